#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lgt/abelian_group.hpp"
#include "lgt/errors.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>

using namespace lgt;
using mp = boost::multiprecision::cpp_dec_float_50;

namespace {

// C1 from scratch in 50-digit arithmetic, with alpha summed over residues.
mp c1_reference(const std::vector<int> &factors, double beta_d)
{
	mp beta(beta_d);
	mp pi = boost::multiprecision::default_ops::get_constant_pi<mp::backend_type>();
	mp a = 0;
	int order = 1;
	for (int n : factors)
		order *= n;
	for (int code = 1; code < order; ++code)
	{
		int rest = code;
		mp tr = 0;
		for (int j = static_cast<int>(factors.size()) - 1; j >= 0; --j)
		{
			int r = rest % factors[j];
			rest /= factors[j];
			tr += cos(2 * pi * r / factors[j]) - 1;
		}
		a += exp(2 * beta * tr);
	}
	mp one = 1;
	return mp(20) / (mp(225) * (one - 5 * a) * (one - 5 * a)) * (one + mp(2) / (one - 30 * a));
}

} // namespace

TEST_CASE("parse and print")
{
	CHECK(GroupSpec::parse("Z2").order() == 2);
	CHECK(GroupSpec::parse("z3xZ2").factors() == std::vector<int>{3, 2});
	CHECK(GroupSpec::parse("Z3xz2").to_string() == "Z3xZ2");
	CHECK_THROWS_AS(GroupSpec::parse("Z1"), DomainError);
	CHECK_THROWS_AS(GroupSpec::parse("Z2x"), DomainError);
	CHECK_THROWS_AS(GroupSpec::parse("Q8"), DomainError);
	CHECK_THROWS_AS(GroupSpec::parse(""), DomainError);
}

TEST_CASE("arithmetic is componentwise")
{
	GroupSpec G = GroupSpec::parse("Z3xZ4");
	for (auto a : G.elements())
		for (auto b : G.elements())
		{
			auto ra = G.residues(a), rb = G.residues(b), rc = G.residues(G.add(a, b));
			CHECK(rc[0] == (ra[0] + rb[0]) % 3);
			CHECK(rc[1] == (ra[1] + rb[1]) % 4);
		}
	for (auto a : G.elements())
		CHECK(G.add(a, G.neg(a)).is_zero());
	CHECK_THROWS_AS(G.element({3, 0}), DomainError);
	CHECK_THROWS_AS(re_tr_rho(G, GroupElement{12}), DomainError);
}

TEST_CASE("character traces")
{
	GroupSpec Z2({2}), Z3({3});
	CHECK(re_tr_rho(Z2, {0}) == 1.0);
	CHECK(re_tr_rho(Z2, {1}) == doctest::Approx(-1.0).epsilon(1e-15));
	CHECK(re_tr_rho(Z3, {1}) == doctest::Approx(-0.5).epsilon(1e-15));
	CHECK(std::abs(tr_rho(Z3, {1}) - std::polar(1.0, 2 * M_PI / 3)) < 1e-15);
	GroupSpec P({2, 3});
	CHECK(re_tr_rho(P, P.zero()) == 2.0);
}

TEST_CASE("phi and alpha")
{
	GroupSpec Z2({2}), Z3({3}), Z4({4});
	for (double b : {0.0, 0.3, 1.0, 2.5})
	{
		CHECK(phi_beta(Z2, {0}, b) == 1.0);
		CHECK(phi_beta(Z2, {1}, b) == doctest::Approx(std::exp(-2 * b)).epsilon(1e-14));
		CHECK(phi_beta(Z3, {1}, b) == doctest::Approx(std::exp(-1.5 * b)).epsilon(1e-14));
		CHECK(alpha(Z2, b) == doctest::Approx(std::exp(-4 * b)).epsilon(1e-14));
		CHECK(alpha(Z3, b) == doctest::Approx(2 * std::exp(-3 * b)).epsilon(1e-14));
		for (auto g : Z4.elements())
			CHECK(phi_beta(Z4, g, b) == phi_beta(Z4, Z4.neg(g), b));
	}
	CHECK(alpha(Z2, 0.0) == 1.0);
	CHECK_THROWS_AS(phi_beta(Z2, {1}, -0.1), DomainError);
	// strictly decreasing, and phi^12 <= alpha^6
	double prev = alpha(Z4, 0.0);
	for (int i = 1; i <= 50; ++i)
	{
		double b = 0.1 * i;
		double a = alpha(Z4, b);
		CHECK(a < prev);
		prev = a;
		for (auto g : Z4.elements())
			if (!g.is_zero())
				CHECK(std::pow(phi_beta(Z4, g, b), 12) <= std::pow(a, 6));
	}
	// phi underflows to 0 at large beta without trouble
	CHECK(phi_beta(Z2, {1}, 1e6) == 0.0);
}

TEST_CASE("constants")
{
	GroupSpec Z2({2});
	auto k = constants(Z2, 1.0);
	CHECK(k.c2 == 30.0);
	CHECK(k.c1 > 0);
	CHECK(std::isfinite(k.c1));
	CHECK(constants(Z2, 60.0).c1 == doctest::Approx(4.0 / 15.0).epsilon(1e-15));
	// 30 alpha >= 1 is rejected
	CHECK_THROWS_AS(constants(Z2, 0.5), PreconditionError);
	CouplingParams cp(Z2, 0.5);
	CHECK_FALSE(cp.c1_defined());
	CHECK(std::isnan(cp.c1));
}

TEST_CASE("c1 against 50-digit evaluation")
{
	for (auto factors : {std::vector<int>{2}, std::vector<int>{3}, std::vector<int>{2, 3}})
	{
		GroupSpec G(factors);
		int checked = 0;
		for (int i = 0; i < 100; ++i)
		{
			double b = 1.0 + 0.05 * i;
			if (30 * alpha(G, b) >= 1)
				continue;
			double ref = static_cast<double>(c1_reference(factors, b));
			CHECK(std::abs(constants(G, b).c1 - ref) <= 1e-12 * ref);
			++checked;
		}
		CHECK(checked > 50);
	}
}

#include "lgt/abelian_group.hpp"

#include "lgt/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace lgt {

namespace {

constexpr std::uint32_t kMaxOrder = 4096;

} // namespace

GroupSpec::GroupSpec(std::vector<int> factors) : factors_(std::move(factors))
{
	if (factors_.empty())
		throw DomainError("group needs at least one cyclic factor");
	for (int n : factors_)
	{
		if (n < 2)
			throw DomainError("cyclic factor of order " + std::to_string(n) + " (must be >= 2)");
		if (order_ * static_cast<std::uint64_t>(n) > kMaxOrder)
			throw DomainError("group order exceeds " + std::to_string(kMaxOrder));
		order_ *= static_cast<std::uint32_t>(n);
	}

	stride_.assign(factors_.size(), 1);
	for (int j = static_cast<int>(factors_.size()) - 2; j >= 0; --j)
		stride_[j] = stride_[j + 1] * static_cast<std::uint32_t>(factors_[j + 1]);

	auto t = std::make_shared<Tables>();
	t->add.resize(static_cast<std::size_t>(order_) * order_);
	t->neg.resize(order_);
	t->re_tr.resize(order_);
	std::vector<int> ra, rb, rc(factors_.size());
	for (std::uint32_t a = 0; a < order_; ++a)
	{
		ra = residues({a});
		double s = 0;
		for (std::size_t j = 0; j < factors_.size(); ++j)
		{
			// cos is even in the residue; fold so that g and -g agree bitwise
			int r = std::min(ra[j], factors_[j] - ra[j]);
			s += std::cos(2.0 * std::numbers::pi * r / factors_[j]);
			rc[j] = (factors_[j] - ra[j]) % factors_[j];
		}
		t->re_tr[a] = s;
		t->neg[a] = element(rc).code;
		for (std::uint32_t b = 0; b < order_; ++b)
		{
			rb = residues({b});
			for (std::size_t j = 0; j < factors_.size(); ++j)
				rc[j] = (ra[j] + rb[j]) % factors_[j];
			t->add[a * order_ + b] = element(rc).code;
		}
	}
	tables_ = std::move(t);
}

GroupSpec GroupSpec::parse(std::string_view text)
{
	std::vector<int> f;
	std::size_t i = 0;
	auto fail = [&] { return DomainError("malformed group '" + std::string(text) + "' (expected e.g. Z2 or Z3xZ2)"); };
	while (true)
	{
		if (i >= text.size() || std::tolower(static_cast<unsigned char>(text[i])) != 'z')
			throw fail();
		++i;
		int n = 0;
		auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), n);
		if (ec != std::errc() || ptr == text.data() + i)
			throw fail();
		i = static_cast<std::size_t>(ptr - text.data());
		if (n < 2)
			throw DomainError("group '" + std::string(text) + "' has a factor of order < 2");
		f.push_back(n);
		if (i == text.size())
			break;
		if (std::tolower(static_cast<unsigned char>(text[i])) != 'x')
			throw fail();
		++i;
	}
	return GroupSpec(std::move(f));
}

std::string GroupSpec::to_string() const
{
	std::string s;
	for (std::size_t j = 0; j < factors_.size(); ++j)
	{
		if (j)
			s += 'x';
		s += 'Z' + std::to_string(factors_[j]);
	}
	return s;
}

void GroupSpec::check(GroupElement g) const
{
	if (g.code >= order_)
		throw DomainError("group element code " + std::to_string(g.code) + " out of range for " + to_string());
}

GroupElement GroupSpec::add(GroupElement a, GroupElement b) const
{
	check(a);
	check(b);
	return {add_code(a.code, b.code)};
}

GroupElement GroupSpec::neg(GroupElement a) const
{
	check(a);
	return {neg_code(a.code)};
}

std::vector<int> GroupSpec::residues(GroupElement g) const
{
	check(g);
	std::vector<int> r(factors_.size());
	for (std::size_t j = 0; j < factors_.size(); ++j)
		r[j] = static_cast<int>((g.code / stride_[j]) % factors_[j]);
	return r;
}

GroupElement GroupSpec::element(const std::vector<int> &r) const
{
	if (r.size() != factors_.size())
		throw DomainError("expected " + std::to_string(factors_.size()) + " residues");
	std::uint32_t c = 0;
	for (std::size_t j = 0; j < factors_.size(); ++j)
	{
		if (r[j] < 0 || r[j] >= factors_[j])
			throw DomainError("residue " + std::to_string(r[j]) + " out of range for Z" + std::to_string(factors_[j]));
		c += static_cast<std::uint32_t>(r[j]) * stride_[j];
	}
	return {c};
}

GroupElement GroupSpec::element(std::uint32_t code) const
{
	check({code});
	return {code};
}

GroupElement GroupSpec::unit(int j) const
{
	if (j < 0 || j >= dim())
		throw DomainError("factor index out of range");
	return {stride_[j]};
}

std::vector<GroupElement> GroupSpec::elements() const
{
	std::vector<GroupElement> v(order_);
	for (std::uint32_t c = 0; c < order_; ++c)
		v[c] = {c};
	return v;
}

double re_tr_rho(const GroupSpec &G, GroupElement g)
{
	if (g.code >= G.order())
		throw DomainError("group element out of range for " + G.to_string());
	return G.re_tr_code(g.code);
}

std::complex<double> tr_rho(const GroupSpec &G, GroupElement g)
{
	auto r = G.residues(g);
	std::complex<double> s = 0;
	for (std::size_t j = 0; j < r.size(); ++j)
		s += std::polar(1.0, 2.0 * std::numbers::pi * r[j] / G.factors()[j]);
	return s;
}

double phi_beta(const GroupSpec &G, GroupElement g, double beta)
{
	if (!(beta >= 0))
		throw DomainError("beta must be >= 0");
	double x = re_tr_rho(G, g) - G.dim();
	// Re tr rho(0) - Re tr rho(g) can carry rounding noise of order 1e-16
	if (x > 0)
		x = 0;
	return std::exp(beta * x);
}

double alpha(const GroupSpec &G, double beta)
{
	double s = 0;
	for (std::uint32_t c = 1; c < G.order(); ++c)
	{
		double p = phi_beta(G, {c}, beta);
		s += p * p;
	}
	return s;
}

Constants constants(const GroupSpec &G, double beta)
{
	double a = alpha(G, beta);
	if (!(30.0 * a < 1.0))
		throw PreconditionError("constants require 30*alpha(beta) < 1, got 30*alpha = " + std::to_string(30.0 * a));
	double c1 = 20.0 / (225.0 * (1.0 - 5.0 * a) * (1.0 - 5.0 * a)) * (1.0 + 2.0 / (1.0 - 30.0 * a));
	return {c1, 30.0};
}

CouplingParams::CouplingParams(const GroupSpec &G, double b)
	: beta(b), alpha(lgt::alpha(G, b)), c1(std::numeric_limits<double>::quiet_NaN())
{
	if (c1_defined())
		c1 = constants(G, b).c1;
}

} // namespace lgt

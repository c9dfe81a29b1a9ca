#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lgt/cell_complex.hpp"

#include <bit>
#include <map>
#include <random>
#include <set>

using namespace lgt;

namespace {

DifferentialForm random_form(const BoxLattice &box, const GroupSpec &G, int k, std::mt19937_64 &rng, double density = 1.0)
{
	DifferentialForm f(box, G, k);
	std::uniform_int_distribution<std::uint32_t> pick(0, G.order() - 1);
	std::bernoulli_distribution on(density);
	for (auto &c : f.codes())
		c = on(rng) ? pick(rng) : 0;
	return f;
}

// Coefficient of dx_I@x in d(1_{x = xh} dx_J), straight from
// d f = sum_i (f(x + e_i) - f(x)) dx_i ^ dx_J.
int d_indicator(const Cell &target, const Cell &source)
{
	int total = 0;
	for (int i = 0; i < kMaxDim; ++i)
	{
		if (!(target.dirs >> i & 1))
			continue;
		if ((target.dirs & ~(1u << i)) != source.dirs)
			continue;
		// dx_i ^ dx_J = (-1)^{#{j in J : j < i}} dx_I
		int s = std::popcount(static_cast<unsigned>(source.dirs & ((1u << i) - 1))) % 2 ? -1 : 1;
		Point xp = target.base;
		xp[i] += 1;
		int diff = (xp == source.base) - (target.base == source.base);
		total += s * diff;
	}
	return total;
}

} // namespace

TEST_CASE("cell counts")
{
	BoxLattice b = BoxLattice::parse("0..1,0..1,0..1,0..1");
	CHECK(b.count(0) == 16);
	CHECK(b.count(1) == 32);
	CHECK(b.count(2) == 24);
	CHECK(b.count(3) == 8);
	CHECK(b.count(4) == 1);
	CHECK(b.to_string() == "0..1,0..1,0..1,0..1");

	// product formula against exhaustive generation on an uneven box
	BoxLattice u({{-1, 1}, {0, 3}, {2, 3}});
	for (int k = 0; k <= 3; ++k)
	{
		std::size_t formula = 0;
		for (unsigned m = 0; m < 8; ++m)
		{
			if (std::popcount(m) != static_cast<unsigned>(k))
				continue;
			std::size_t p = 1;
			for (int i = 0; i < 3; ++i)
			{
				int w = u.intervals()[i].second - u.intervals()[i].first;
				p *= (m >> i & 1) ? w : w + 1;
			}
			formula += p;
		}
		std::size_t brute = 0;
		for (int x = -1; x <= 1; ++x)
			for (int y = 0; y <= 3; ++y)
				for (int z = 2; z <= 3; ++z)
					for (unsigned m = 0; m < 8; ++m)
					{
						if (std::popcount(m) != static_cast<unsigned>(k))
							continue;
						Cell c;
						c.base = {x, y, z};
						c.dirs = static_cast<std::uint8_t>(m);
						// in box iff every corner is
						bool in = true;
						for (unsigned corner = 0; corner < 8; ++corner)
						{
							if (corner & ~m)
								continue;
							Point q = c.base;
							for (int i = 0; i < 3; ++i)
								q[i] += corner >> i & 1;
							in = in && u.contains(q);
						}
						CHECK(in == u.contains(c));
						brute += in;
					}
		CHECK(formula == u.count(k));
		CHECK(brute == u.count(k));
	}
	CHECK_THROWS_AS(BoxLattice::parse("0..0"), DomainError);
	CHECK_THROWS_AS(BoxLattice::parse("0..1;0..1"), DomainError);
}

TEST_CASE("index round trip")
{
	BoxLattice b({{0, 2}, {1, 3}, {-1, 0}, {0, 1}});
	for (int k = 0; k <= 4; ++k)
		for (std::size_t i = 0; i < b.count(k); ++i)
		{
			Cell c = b.cell(k, i);
			CHECK(c.degree() == k);
			CHECK(b.index(c) == i);
			CHECK(b.index(-c) == i);
		}
	CHECK_FALSE(b.find(make_cell({2, 1, -1, 0}, {0})).has_value());
	CHECK_THROWS_AS(b.index(make_cell({5, 1, -1, 0}, {0})), PreconditionError);
}

TEST_CASE("plaquette boundary")
{
	auto d = boundary(make_cell({0, 0, 0, 0}, {0, 1}));
	std::set<Cell> got(d.begin(), d.end());
	std::set<Cell> want{make_cell({0, 0, 0, 0}, {0}), make_cell({1, 0, 0, 0}, {1}), make_cell({0, 1, 0, 0}, {0}, -1),
						make_cell({0, 0, 0, 0}, {1}, -1)};
	CHECK(got == want);
	auto dn = boundary(make_cell({0, 0, 0, 0}, {0, 1}, -1));
	for (std::size_t i = 0; i < d.size(); ++i)
		CHECK(dn[i] == -d[i]);
	auto de = boundary(make_cell({0, 0, 0, 0}, {2}));
	REQUIRE(de.size() == 2);
	CHECK(de[0].sign == -de[1].sign);
	CHECK_THROWS_AS(boundary(make_cell({0, 0, 0, 0}, {})), PreconditionError);
}

TEST_CASE("boundary agrees with d of indicators on [0,2]^4")
{
	BoxLattice b = BoxLattice::cube(4, 2);
	for (int k = 1; k <= 4; ++k)
		for (std::size_t i = 0; i < b.count(k); ++i)
		{
			Cell c = b.cell(k, i);
			auto d = boundary(c);
			CHECK(d.size() == static_cast<std::size_t>(2 * k));
			std::map<Cell, int> coeff;
			for (const Cell &f : d)
				coeff[f.positive_part()] += f.sign;
			// every (k-1)-cell of the box: coefficient from the definition
			for (std::size_t j = 0; j < b.count(k - 1); ++j)
			{
				Cell f = b.cell(k - 1, j);
				int want = d_indicator(c, f);
				auto it = coeff.find(f);
				CHECK(want == (it == coeff.end() ? 0 : it->second));
			}
		}
}

TEST_CASE("coboundary")
{
	int n = 4;
	Cell p = make_cell({5, 5, 5, 5}, {1, 3});
	auto cp = coboundary(p, n);
	CHECK(cp.size() == 4);
	for (const Cell &c : cp)
	{
		auto d = boundary(c);
		CHECK(std::count(d.begin(), d.end(), p) == 1);
	}
	Cell e = make_cell({5, 5, 5, 5}, {2});
	CHECK(coboundary(e, n).size() == 6);

	BoxLattice big = BoxLattice::cube(4, 6);
	auto idx = big.index(e);
	CHECK(big.cofaces(1, idx).size() == 6);
	BoxLattice tiny = BoxLattice::cube(4, 1);
	for (std::size_t i = 0; i < tiny.count(1); ++i)
		CHECK(tiny.cofaces(1, i).size() == 3);
	for (std::size_t i = 0; i < tiny.count(2); ++i)
		CHECK(tiny.cofaces(2, i).size() == 2);

	// box cofaces are the in-box part of the infinite coboundary
	for (std::size_t i = 0; i < big.count(2); ++i)
	{
		Cell q = big.cell(2, i);
		std::set<Cell> want;
		for (const Cell &c : coboundary(q, n))
			if (big.contains(c))
				want.insert(c);
		std::set<Cell> got;
		for (auto in : big.cofaces(2, i))
		{
			Cell c = big.cell(3, in.index);
			c.sign = in.sign;
			got.insert(c);
		}
		CHECK(got == want);
	}
}

TEST_CASE("hodge star")
{
	BoxLattice b = BoxLattice::cube(4, 1);
	for (int k = 0; k <= 4; ++k)
		for (std::size_t i = 0; i < b.count(k); ++i)
			for (int s : {1, -1})
			{
				Cell c = b.cell(k, i);
				c.sign = static_cast<std::int8_t>(s);
				Cell st = hodge_star(c, 4);
				CHECK(st.dual);
				CHECK(st.degree() == 4 - k);
				Cell back = hodge_star(st, 4);
				int want = (k * (4 - k)) % 2 ? -1 : 1;
				CHECK(back.dual == false);
				CHECK(back.base == c.base);
				CHECK(back.dirs == c.dirs);
				CHECK(back.sign == want * c.sign);
			}
	Cell top = make_cell({0, 0, 0, 0}, {0, 1, 2, 3});
	CHECK(hodge_star(top, 4).degree() == 0);
	// *dx_0 = dy_1 ^ dy_2 ^ dy_3 and *dx_1 = -dy_0 ^ dy_2 ^ dy_3
	CHECK(hodge_star(make_cell({0, 0, 0, 0}, {0}), 4).sign == 1);
	CHECK(hodge_star(make_cell({0, 0, 0, 0}, {1}), 4).sign == -1);
}

TEST_CASE("wedge")
{
	Cell e0 = make_cell({1, 1, 0, 0}, {0});
	Cell e2 = make_cell({1, 1, 0, 0}, {2});
	std::vector<Cell> v{e0, e2};
	CHECK(*wedge(v) == make_cell({1, 1, 0, 0}, {0, 2}));
	std::vector<Cell> w{e2, e0};
	CHECK(*wedge(w) == make_cell({1, 1, 0, 0}, {0, 2}, -1));
	std::vector<Cell> rep{e0, e0};
	CHECK_FALSE(wedge(rep).has_value());
	std::vector<Cell> apart{e0, make_cell({0, 1, 0, 0}, {2})};
	CHECK_FALSE(wedge(apart).has_value());
}

TEST_CASE("d of d vanishes and Bianchi holds")
{
	std::mt19937_64 rng(11);
	BoxLattice b = BoxLattice::cube(4, 2);
	for (auto name : {"Z2", "Z3", "Z4", "Z2xZ3"})
	{
		GroupSpec G = GroupSpec::parse(name);
		for (int k = 0; k <= 2; ++k)
			for (int t = 0; t < 30; ++t)
			{
				auto f = random_form(b, G, k, rng);
				CHECK(exterior_derivative(exterior_derivative(f)).is_zero());
			}
		for (int t = 0; t < 50; ++t)
		{
			auto w = exterior_derivative(random_form(b, G, 1, rng));
			// Bianchi written out over the oriented faces of each 3-cell
			for (std::size_t c = 0; c < b.count(3); ++c)
			{
				GroupElement s = G.zero();
				for (const Cell &p : boundary(b.cell(3, c)))
					s = G.add(s, w.value(p));
				CHECK(s.is_zero());
			}
			CHECK(is_closed(w));
		}
	}
	GroupSpec Z2({2});
	DifferentialForm s(b, Z2, 1);
	CHECK(exterior_derivative(s).is_zero());
}

TEST_CASE("minimal vortex support")
{
	BoxLattice b = BoxLattice::cube(4, 2);
	GroupSpec Z3({3});
	DifferentialForm s(b, Z3, 1);
	s.set(make_cell({1, 1, 1, 1}, {2}), {1});
	auto w = exterior_derivative(s);
	CHECK(w.support().size() == 12);
	CHECK(w.positive_support_size() == 6);

	DifferentialForm single(b, Z3, 2);
	single.set(make_cell({1, 1, 0, 0}, {0, 1}), {2});
	CHECK_FALSE(is_closed(single));
	CHECK(is_closed(DifferentialForm(b, Z3, 2)));
}

TEST_CASE("anti-derivative")
{
	std::mt19937_64 rng(5);
	for (auto box : {BoxLattice::cube(4, 1), BoxLattice({{0, 2}, {-1, 1}, {0, 1}, {3, 4}}), BoxLattice::cube(3, 2)})
		for (auto name : {"Z2", "Z3", "Z4", "Z2xZ2"})
		{
			GroupSpec G = GroupSpec::parse(name);
			auto tree = spanning_tree_edges(box);
			CHECK(static_cast<std::size_t>(std::count(tree.begin(), tree.end(), 1)) == box.count(0) - 1);
			DifferentialForm zero(box, G, 2);
			CHECK(anti_derivative(zero).is_zero());
			for (int t = 0; t < 40; ++t)
			{
				auto w = exterior_derivative(random_form(box, G, 1, rng, 0.3));
				auto sigma = anti_derivative(w);
				CHECK(exterior_derivative(sigma) == w);
				for (std::size_t e = 0; e < tree.size(); ++e)
					if (tree[e])
						CHECK(sigma.codes()[e] == 0);
			}
		}

	BoxLattice b = BoxLattice::cube(4, 1);
	GroupSpec Z2({2});
	DifferentialForm bad(b, Z2, 2);
	bad.set(make_cell({0, 0, 0, 0}, {0, 1}), {1});
	try
	{
		anti_derivative(bad);
		FAIL("expected NotClosedError");
	}
	catch (const NotClosedError &e)
	{
		CHECK(e.witness().degree() == 3);
		auto d = boundary(e.witness());
		CHECK(std::any_of(d.begin(), d.end(), [](const Cell &c) { return c.positive_part() == make_cell({0, 0, 0, 0}, {0, 1}); }));
	}
}

TEST_CASE("gauge orbit count on small boxes")
{
	// every sigma, distinct images counted: |G|^(E - V + 1)
	GroupSpec Z2({2});
	for (auto box : {BoxLattice::cube(3, 1), BoxLattice({{0, 2}, {0, 1}, {0, 1}})})
	{
		std::size_t E = box.count(1), V = box.count(0);
		std::set<std::vector<std::uint32_t>> images;
		for (std::uint64_t m = 0; m < (std::uint64_t{1} << E); ++m)
		{
			DifferentialForm s(box, Z2, 1);
			for (std::size_t e = 0; e < E; ++e)
				s.codes()[e] = m >> e & 1;
			images.insert(exterior_derivative(s).codes());
		}
		CHECK(images.size() == (std::size_t{1} << (E - V + 1)));
	}
}

TEST_CASE("boundary cells")
{
	BoxLattice tiny = BoxLattice::cube(4, 1);
	auto all = CellSet::all(tiny, 2);
	CHECK(boundary_cells(all) == all);
	BoxLattice big = BoxLattice::cube(4, 6);
	auto allb = CellSet::all(big, 2);
	auto d = boundary_cells(allb);
	CHECK(d.size() < allb.size());
	CHECK_FALSE(d.contains(make_cell({3, 3, 3, 3}, {0, 1})));
	CHECK(d.contains(make_cell({0, 3, 3, 3}, {1, 2})));
	CHECK(boundary_cells(CellSet(big, 2)).empty());
	CellSet half(big, 2);
	half.insert(make_cell({3, 3, 3, 3}, {0, 1}));
	CHECK_THROWS_AS(boundary_cells(half), PreconditionError);
	// the definition: P-cells sharing a 3-cell with a plaquette outside P
	for (std::size_t i = 0; i < big.count(2); ++i)
	{
		Cell p = big.cell(2, i);
		bool outside_neighbour = false;
		for (const Cell &c : coboundary(p, 4))
			for (const Cell &q : boundary(c))
				outside_neighbour = outside_neighbour || !big.contains(q);
		CHECK(d.contains(p) == outside_neighbour);
	}
}

TEST_CASE("restrict")
{
	std::mt19937_64 rng(3);
	BoxLattice b = BoxLattice::cube(4, 1);
	GroupSpec Z3({3});
	for (int t = 0; t < 100; ++t)
	{
		auto f = random_form(b, Z3, 2, rng, 0.5);
		std::vector<std::size_t> keep;
		for (std::size_t i = 0; i < b.count(2); ++i)
			if (rng() % 2)
				keep.push_back(i);
		auto S = CellSet::symmetric_from(b, 2, keep);
		auto r = restrict(f, S);
		CHECK(r.support() == (f.support() & S));
		CHECK(restrict(f, f.support()) == f);
	}
	auto f = random_form(b, Z3, 2, rng);
	CHECK(restrict(f, CellSet(b, 2)).is_zero());
	CHECK(restrict(f, CellSet::all(b, 2)) == f);
	CellSet one(b, 2);
	one.insert(b.cell(2, 0));
	CHECK_THROWS_AS(restrict(f, one), PreconditionError);
}

TEST_CASE("irreducibility")
{
	BoxLattice b = BoxLattice::cube(4, 6);
	GroupSpec Z2({2});
	DifferentialForm s(b, Z2, 1);
	s.set(make_cell({2, 2, 2, 2}, {1}), {1});
	auto nu = exterior_derivative(s);
	for (std::size_t i : nu.positive_support())
	{
		auto P = CellSet::symmetric_from(b, 2, std::vector<std::size_t>{i});
		CHECK(is_irreducible(nu, P));
	}
	DifferentialForm s2 = s;
	s2.set(make_cell({4, 4, 4, 4}, {3}), {1});
	auto nu2 = exterior_derivative(s2);
	auto P = CellSet::symmetric_from(b, 2, std::vector<std::size_t>{nu.positive_support()[0]});
	CHECK_FALSE(is_irreducible(nu2, P));
	CHECK(is_irreducible(DifferentialForm(b, Z2, 2), CellSet(b, 2)));
	CHECK_FALSE(is_irreducible(nu, CellSet(b, 2)));
	CHECK_THROWS_AS(is_irreducible(nu2, P, 8), ResourceError);
}

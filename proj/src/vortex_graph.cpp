#include "lgt/vortex_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace lgt {

std::vector<PlaquetteId> plaquette_neighbours(const BoxLattice &box, PlaquetteId p)
{
	std::size_t i = p / 2;
	std::vector<PlaquetteId> out{p ^ 1u};
	if (box.dim() >= 3)
		for (const Incidence &c : box.cofaces(2, i))
			for (const Incidence &f : box.faces(3, c.index))
				if (f.index != i)
				{
					out.push_back(2 * f.index);
					out.push_back(2 * f.index + 1);
				}
	std::sort(out.begin(), out.end());
	out.erase(std::unique(out.begin(), out.end()), out.end());
	return out;
}

bool plaquettes_adjacent(const Cell &a, const Cell &b, int n)
{
	if (a == b)
		return false;
	Cell pa = a.positive_part(), pb = b.positive_part();
	if (pa == pb)
		return true;
	for (const Cell &c : coboundary(pa, n))
		for (const Cell &f : boundary(c))
			if (f.positive_part() == pb)
				return true;
	return false;
}

namespace {

struct UnionFind
{
	std::vector<std::uint32_t> parent;
	explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
	std::uint32_t find(std::uint32_t x)
	{
		while (parent[x] != x)
		{
			parent[x] = parent[parent[x]];
			x = parent[x];
		}
		return x;
	}
	void unite(std::uint32_t a, std::uint32_t b)
	{
		a = find(a);
		b = find(b);
		if (a != b)
			parent[std::max(a, b)] = std::min(a, b);
	}
};

void require_plaquette(const BoxLattice &box, const Cell &p, const char *what)
{
	if (p.degree() != 2 || p.dual || !box.contains(p))
		throw PreconditionError(std::string(what) + " must be a plaquette of the box");
}

} // namespace

VortexGraph::VortexGraph(const DifferentialForm &omega) : VortexGraph(omega, DifferentialForm(omega.box(), omega.group(), 2))
{}

VortexGraph::VortexGraph(const DifferentialForm &omega, const DifferentialForm &omega_prime) : box_(omega.box())
{
	if (omega.degree() != 2 || omega_prime.degree() != 2)
		throw PreconditionError("the vortex graph is built from 2-forms");
	if (!box_.contains(omega_prime.box()))
		throw PreconditionError("omega' must live on a box inside omega's box");
	const std::size_t P = box_.count(2);
	in_.assign(P, 0);
	for (std::size_t i = 0; i < P; ++i)
		in_[i] = omega.codes()[i] != 0;
	const BoxLattice &bp = omega_prime.box();
	for (std::size_t j = 0; j < bp.count(2); ++j)
		if (omega_prime.codes()[j])
			in_[box_.index(bp.cell(2, j))] = 1;

	UnionFind uf(P);
	for (std::size_t i = 0; i < P; ++i)
		if (in_[i])
			for (const Incidence &c : box_.cofaces(2, i))
				for (const Incidence &f : box_.faces(3, c.index))
					if (in_[f.index])
						uf.unite(static_cast<std::uint32_t>(i), f.index);
	label_.assign(P, -1);
	std::map<std::uint32_t, int> ids;
	for (std::size_t i = 0; i < P; ++i)
		if (in_[i])
		{
			auto [it, fresh] = ids.emplace(uf.find(static_cast<std::uint32_t>(i)), static_cast<int>(ids.size()));
			label_[i] = it->second;
		}
	components_ = ids.size();
}

bool VortexGraph::has_vertex(const Cell &p) const
{
	auto i = box_.find(p);
	return p.degree() == 2 && i && in_[*i];
}

std::size_t VortexGraph::vertex_count() const { return 2 * static_cast<std::size_t>(std::count(in_.begin(), in_.end(), 1)); }

std::vector<Cell> VortexGraph::vertices() const
{
	std::vector<Cell> v;
	for (std::size_t i = 0; i < in_.size(); ++i)
		if (in_[i])
		{
			Cell c = box_.cell(2, i);
			v.push_back(c);
			v.push_back(-c);
		}
	return v;
}

bool VortexGraph::adjacent(const Cell &a, const Cell &b) const
{
	return has_vertex(a) && has_vertex(b) && plaquettes_adjacent(a, b, box_.dim());
}

int VortexGraph::component(const Cell &p) const
{
	auto i = box_.find(p);
	if (p.degree() != 2 || !i)
		return -1;
	return label_[*i];
}

std::vector<std::vector<Cell>> VortexGraph::component_sets() const
{
	std::vector<std::vector<Cell>> out(components_);
	for (std::size_t i = 0; i < in_.size(); ++i)
		if (in_[i])
		{
			Cell c = box_.cell(2, i);
			out[label_[i]].push_back(c);
			out[label_[i]].push_back(-c);
		}
	return out;
}

std::vector<Cell> VortexGraph::geodesic(const Cell &from, const Cell &to) const
{
	if (!has_vertex(from) || !has_vertex(to))
		return {};
	PlaquetteId s = plaquette_id(box_, from), t = plaquette_id(box_, to);
	if (s == t)
		return {from};
	std::vector<std::int64_t> parent(2 * in_.size(), -1);
	parent[s] = s;
	std::deque<PlaquetteId> q{s};
	while (!q.empty())
	{
		PlaquetteId u = q.front();
		q.pop_front();
		for (PlaquetteId v : plaquette_neighbours(box_, u))
			if (in_[v / 2] && parent[v] < 0)
			{
				parent[v] = u;
				if (v == t)
				{
					std::vector<Cell> path;
					for (PlaquetteId w = t; w != s; w = static_cast<PlaquetteId>(parent[w]))
						path.push_back(plaquette_cell(box_, w));
					path.push_back(from);
					std::reverse(path.begin(), path.end());
					return path;
				}
				q.push_back(v);
			}
	}
	return {};
}

bool connected(const VortexGraph &g, const CellSet &P1, const CellSet &P2)
{
	if (!(P1.box() == g.box()) || !(P2.box() == g.box()) || P1.degree() != 2 || P2.degree() != 2)
		throw PreconditionError("plaquette sets must live on the graph's box");
	if (!(P1 & P2).empty())
		throw PreconditionError("connected expects disjoint plaquette sets");
	std::set<int> seen;
	for (const Cell &c : P1.cells())
		if (int l = g.component(c); l >= 0)
			seen.insert(l);
	for (const Cell &c : P2.cells())
		if (int l = g.component(c); l >= 0 && seen.count(l))
			return true;
	return false;
}

// ---------------------------------------------------------------------------

namespace {

// Multi-source BFS over oriented plaquettes; stops at the first target.
// Returns (distance in vertices, parent array) or -1 distance.
int bfs(const BoxLattice &box, const std::vector<PlaquetteId> &sources, const std::vector<std::uint8_t> *target,
		std::vector<int> &dist, std::vector<std::int64_t> *parent, PlaquetteId *hit)
{
	dist.assign(2 * box.count(2), 0);
	if (parent)
		parent->assign(dist.size(), -1);
	std::deque<PlaquetteId> q;
	for (PlaquetteId s : sources)
		if (!dist[s])
		{
			dist[s] = 1;
			q.push_back(s);
			if (target && (*target)[s])
			{
				if (hit)
					*hit = s;
				return 1;
			}
		}
	while (!q.empty())
	{
		PlaquetteId u = q.front();
		q.pop_front();
		for (PlaquetteId v : plaquette_neighbours(box, u))
			if (!dist[v])
			{
				dist[v] = dist[u] + 1;
				if (parent)
					(*parent)[v] = u;
				if (target && (*target)[v])
				{
					if (hit)
						*hit = v;
					return dist[v];
				}
				q.push_back(v);
			}
	}
	return -1;
}

std::vector<PlaquetteId> ids_of(const BoxLattice &box, const CellSet &S)
{
	std::vector<PlaquetteId> v;
	for (std::size_t i = 0; i < box.count(2); ++i)
	{
		if (S.flags(i) & 1)
			v.push_back(static_cast<PlaquetteId>(2 * i));
		if (S.flags(i) & 2)
			v.push_back(static_cast<PlaquetteId>(2 * i + 1));
	}
	return v;
}

} // namespace

int dist_star(const BoxLattice &box, const CellSet &P1, const CellSet &P2)
{
	if (!(P1.box() == box) || !(P2.box() == box) || P1.degree() != 2 || P2.degree() != 2)
		throw PreconditionError("dist_star expects plaquette sets of the box");
	if (P1.empty() || P2.empty())
		throw PreconditionError("dist_star expects non-empty sets");
	if (!(P1 & P2).empty())
		throw PreconditionError("dist_star expects disjoint sets");
	std::vector<std::uint8_t> target(2 * box.count(2), 0);
	for (PlaquetteId t : ids_of(box, P2))
		target[t] = 1;
	std::vector<int> dist;
	int d = bfs(box, ids_of(box, P1), &target, dist, nullptr, nullptr);
	if (d < 0)
		throw PreconditionError("no path between the plaquette sets");
	return d;
}

int dist_star(const BoxLattice &box, const Cell &p1, const Cell &p2)
{
	require_plaquette(box, p1, "p1");
	require_plaquette(box, p2, "p2");
	CellSet a(box, 2), b(box, 2);
	a.insert(p1);
	b.insert(p2);
	return dist_star(box, a, b);
}

std::vector<int> dist_star_field(const BoxLattice &box, const CellSet &P)
{
	if (P.empty())
		throw PreconditionError("dist_star_field expects a non-empty set");
	std::vector<int> dist;
	bfs(box, ids_of(box, P), nullptr, dist, nullptr, nullptr);
	return dist;
}

std::vector<Cell> dist_star_path(const BoxLattice &box, const Cell &p1, const Cell &p2)
{
	require_plaquette(box, p1, "p1");
	require_plaquette(box, p2, "p2");
	if (p1 == p2)
		return {p1};
	std::vector<std::uint8_t> target(2 * box.count(2), 0);
	PlaquetteId t = plaquette_id(box, p2), s = plaquette_id(box, p1);
	target[t] = 1;
	std::vector<int> dist;
	std::vector<std::int64_t> parent;
	PlaquetteId hit = 0;
	if (bfs(box, {s}, &target, dist, &parent, &hit) < 0)
		throw PreconditionError("no path between the plaquettes");
	std::vector<Cell> path;
	for (PlaquetteId w = t; w != s; w = static_cast<PlaquetteId>(parent[w]))
		path.push_back(plaquette_cell(box, w));
	path.push_back(p1);
	std::reverse(path.begin(), path.end());
	return path;
}

bool is_path(const std::vector<Cell> &path, int n)
{
	for (std::size_t i = 0; i < path.size(); ++i)
	{
		if (path[i].degree() != 2)
			return false;
		for (std::size_t j = 0; j < i; ++j)
			if (path[i] == path[j])
				return false;
	}
	for (std::size_t i = 0; i + 1 < path.size(); ++i)
		if (!plaquettes_adjacent(path[i], path[i + 1], n))
			return false;
	return true;
}

namespace {

// First pair (i, j), j >= i + 2, sharing a 3-cell up to orientation.
std::optional<std::pair<std::size_t, std::size_t>> overlap_violation(const std::vector<Cell> &path, int n)
{
	for (std::size_t j = 2; j < path.size(); ++j)
		for (std::size_t i = 0; i + 2 <= j; ++i)
			if (plaquettes_adjacent(path[i], path[j], n))
				return std::pair{i, j};
	return std::nullopt;
}

} // namespace

bool is_optimal_path(const std::vector<Cell> &path, int n)
{
	if (!is_path(path, n))
		return false;
	for (std::size_t i = 1; i + 1 < path.size(); ++i)
		if (path[i].sign != path[0].sign)
			return false;
	return !overlap_violation(path, n);
}

// ---------------------------------------------------------------------------

std::uint64_t count_optimal_paths(const BoxLattice &box, const Cell &p1, int m)
{
	require_plaquette(box, p1, "p1");
	if (m < 2)
		throw PreconditionError("optimal paths need m >= 2");
	const std::size_t N = 2 * box.count(2);
	std::vector<std::vector<PlaquetteId>> nbr(N);
	std::vector<std::uint8_t> have(N, 0);
	auto neighbours = [&](PlaquetteId u) -> const std::vector<PlaquetteId> & {
		if (!have[u])
		{
			nbr[u] = plaquette_neighbours(box, u);
			have[u] = 1;
		}
		return nbr[u];
	};
	// blocked[q] > 0: q equals or shares a 3-cell with a plaquette placed
	// before the current last one
	std::vector<std::uint16_t> blocked(N, 0);
	auto block = [&](PlaquetteId u, int d) {
		blocked[u] = static_cast<std::uint16_t>(blocked[u] + d);
		for (PlaquetteId v : neighbours(u))
			blocked[v] = static_cast<std::uint16_t>(blocked[v] + d);
	};
	const PlaquetteId start = plaquette_id(box, p1);
	std::uint64_t count = 0;

	auto dfs = [&](auto &&self, int depth, PlaquetteId last) -> void {
		bool final = depth + 1 == m;
		std::vector<PlaquetteId> next;
		for (PlaquetteId q : neighbours(last))
		{
			if (blocked[q])
				continue;
			if (!final && (q & 1) != (start & 1))
				continue;
			if (final && q / 2 == start / 2)
				continue;
			next.push_back(q);
		}
		if (final)
		{
			count += next.size();
			return;
		}
		block(last, +1);
		for (PlaquetteId q : next)
			self(self, depth + 1, q);
		block(last, -1);
	};
	dfs(dfs, 1, start);
	return count;
}

std::pair<DifferentialForm, DifferentialForm> path_witness(const BoxLattice &box, const GroupSpec &G,
														   const std::vector<Cell> &path)
{
	const int n = box.dim();
	if (path.empty() || !is_path(path, n))
		throw PreconditionError("path_witness expects a non-empty path");
	for (const Cell &p : path)
		require_plaquette(box, p, "path plaquette");
	if (path.size() >= 2 && path.front() != path.back() &&
		dist_star(box, path.front(), path.back()) != static_cast<int>(path.size()))
		throw PreconditionError("path_witness expects a shortest path between its endpoints");

	const std::size_t m = path.size();
	std::vector<std::vector<Cell>> edges(m);
	for (std::size_t k = 0; k < m; ++k)
		edges[k] = boundary(path[k]);
	auto meets = [](const std::vector<Cell> &a, const std::vector<Cell> &b) {
		for (const Cell &x : a)
			for (const Cell &y : b)
				if (x.positive_part() == y.positive_part())
					return true;
		return false;
	};

	std::vector<Cell> chosen;
	while (true)
	{
		std::size_t k = m;
		for (std::size_t i = 0; i < m && k == m; ++i)
			if (!meets(edges[i], chosen))
				k = i;
		if (k == m)
			break;
		Cell e = edges[k].front();
		if (k + 1 < m)
			for (const Cell &x : edges[k])
				if (meets({x}, edges[k + 1]))
				{
					e = x;
					break;
				}
		chosen.push_back(e);
	}

	DifferentialForm s0(box, G, 1), s1(box, G, 1);
	GroupElement g = G.unit(0);
	for (std::size_t j = 0; j < chosen.size(); ++j)
	{
		// edges are numbered from 1: even ones go to omega0
		DifferentialForm &s = (j + 1) % 2 == 0 ? s0 : s1;
		s.set(chosen[j], G.add(s.value(chosen[j]), g));
	}
	return {exterior_derivative(s0), exterior_derivative(s1)};
}

std::vector<Cell> optimalize_geodesic(const std::vector<Cell> &path, const VortexGraph &g)
{
	const int n = g.box().dim();
	if (path.empty())
		throw PreconditionError("empty path");
	for (const Cell &p : path)
		if (!g.has_vertex(p))
			throw PreconditionError("path leaves the graph at " + to_string(p, n));
	if (!is_path(path, n))
		throw PreconditionError("input is not a path");
	if (g.geodesic(path.front(), path.back()).size() != path.size())
		throw PreconditionError("input is not a geodesic of the graph");
	std::vector<Cell> out = path;
	for (std::size_t k = 1; k + 1 < out.size(); ++k)
		if (out[k].sign != out[0].sign)
			out[k] = -out[k];
	if (auto v = overlap_violation(out, n))
		throw PreconditionError("no sign choice makes the path optimal: " + to_string(out[v->first], n) + " (position " +
								std::to_string(v->first + 1) + ") and " + to_string(out[v->second], n) +
								" (position " + std::to_string(v->second + 1) + ") share a 3-cell");
	return out;
}

// ---------------------------------------------------------------------------

ClosureSearch::ClosureSearch(BoxLattice box, GroupSpec group) : box_(std::move(box)), group_(std::move(group)) {}

void ClosureSearch::run(std::span<const std::size_t> seed, std::size_t cap, const Found &found)
{
	const BoxLattice &box = box_;
	const GroupSpec &G = group_;
	const std::size_t P = box.count(2);
	const std::size_t C = box.dim() >= 3 ? box.count(3) : 0;
	const std::size_t per_plaquette = std::max(1, 2 * (box.dim() - 2));
	nodes_ = 0;

	std::vector<std::uint32_t> val(P, 0), sum(C, 0);
	std::vector<std::uint8_t> excluded(P, 0);
	std::set<std::uint32_t> violated;
	std::vector<std::size_t> support;

	auto allowed = [&](std::size_t q) {
		return (allowed_.empty() || allowed_[q]) && (values_.empty() || values_[q] != 0);
	};
	auto toggle = [&](std::size_t q, std::uint32_t v) {
		for (const Incidence &in : box.cofaces(2, q))
		{
			std::uint32_t &s = sum[in.index];
			bool was = s != 0;
			s = G.add_code(s, in.sign > 0 ? v : G.neg_code(v));
			if (was && !s)
				violated.erase(in.index);
			else if (!was && s)
				violated.insert(in.index);
		}
	};
	auto add = [&](std::size_t q, std::uint32_t v) {
		val[q] = v;
		support.push_back(q);
		toggle(q, v);
	};
	auto remove = [&](std::size_t q) {
		toggle(q, G.neg_code(val[q]));
		val[q] = 0;
		support.pop_back();
	};
	auto report = [&] {
		std::vector<std::size_t> s = support;
		std::sort(s.begin(), s.end());
		std::vector<std::uint32_t> v(s.size());
		for (std::size_t i = 0; i < s.size(); ++i)
			v[i] = val[s[i]];
		found(s, v);
	};

	auto explore = [&](auto &&self) -> void {
		if (++nodes_ > budget_)
			throw ResourceError("closure search exceeded its node budget", nodes_);
		if (violated.empty())
		{
			report();
			return;
		}
		if (support.size() + (violated.size() + per_plaquette - 1) / per_plaquette > cap)
			return;
		std::uint32_t c = *violated.begin();
		std::vector<std::size_t> cand;
		for (const Incidence &f : box.faces(3, c))
			if (!val[f.index] && !excluded[f.index] && allowed(f.index))
				cand.push_back(f.index);
		std::sort(cand.begin(), cand.end());
		for (std::size_t q : cand)
		{
			if (!values_.empty())
			{
				add(q, values_[q]);
				self(self);
				remove(q);
			}
			else
				for (std::uint32_t v = 1; v < G.order(); ++v)
				{
					add(q, v);
					self(self);
					remove(q);
				}
			excluded[q] = 1;
		}
		for (std::size_t q : cand)
			excluded[q] = 0;
	};

	std::vector<std::size_t> seeds(seed.begin(), seed.end());
	std::sort(seeds.begin(), seeds.end());
	seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
	for (std::size_t q : seeds)
		if (q >= P)
			throw PreconditionError("seed plaquette outside the box");
	if (seeds.size() > cap)
		return;
	auto place = [&](auto &&self, std::size_t k) -> void {
		if (k == seeds.size())
		{
			explore(explore);
			return;
		}
		std::size_t q = seeds[k];
		if (!values_.empty())
		{
			if (!values_[q])
				return;
			add(q, values_[q]);
			self(self, k + 1);
			remove(q);
			return;
		}
		for (std::uint32_t v = 1; v < G.order(); ++v)
		{
			add(q, v);
			self(self, k + 1);
			remove(q);
		}
	};
	place(place, 0);
}

std::vector<DifferentialForm> minimal_vortex_census(const BoxLattice &box, const GroupSpec &G, const Cell &p,
													 std::size_t cap)
{
	require_plaquette(box, p, "p");
	if (cap > 11)
		throw PreconditionError("census cap must be at most 11 positive plaquettes");
	if (box.dim() < 3)
		throw PreconditionError("census needs 3-cells");
	CellSet bd = boundary_cells(CellSet::all(box, 2));
	std::size_t pi = box.index(p);
	if (bd.flags(pi))
		throw PreconditionError("census plaquette " + to_string(p, box.dim()) + " is a boundary plaquette of the box");
	std::vector<std::uint8_t> allowed(box.count(2));
	for (std::size_t i = 0; i < allowed.size(); ++i)
		allowed[i] = !bd.flags(i);

	ClosureSearch search(box, G);
	search.set_allowed(std::move(allowed));
	std::vector<std::pair<std::vector<std::size_t>, std::vector<std::uint32_t>>> found;
	std::size_t seed[1] = {pi};
	search.run(seed, cap, [&](std::span<const std::size_t> s, std::span<const std::uint32_t> v) {
		found.emplace_back(std::vector<std::size_t>(s.begin(), s.end()), std::vector<std::uint32_t>(v.begin(), v.end()));
	});
	std::sort(found.begin(), found.end(), [](const auto &a, const auto &b) {
		if (a.first.size() != b.first.size())
			return a.first.size() < b.first.size();
		return a < b;
	});
	std::vector<DifferentialForm> out;
	for (const auto &[s, v] : found)
	{
		DifferentialForm w(box, G, 2);
		for (std::size_t i = 0; i < s.size(); ++i)
			w.codes()[s[i]] = v[i];
		out.push_back(std::move(w));
	}
	return out;
}

// ---------------------------------------------------------------------------
// Configuration distance

namespace {

struct Atom
{
	int side; // 0: omega on B, 1: omega' on B'
	std::vector<std::size_t> support; // positive plaquettes of B, sorted
};

class ChainSearch
{
  public:
	ChainSearch(const BoxLattice &B, const BoxLattice &Bp, const GroupSpec &G, double budget)
		: B_(B), Bp_(Bp), G_(G), budget_(budget), used_{std::vector<std::uint8_t>(B.count(2), 0),
													   std::vector<std::uint8_t>(B.count(2), 0)},
		  cover_(B.count(2), 0)
	{
		for (std::size_t j = 0; j < Bp.count(2); ++j)
			to_outer_.push_back(B.index(Bp.cell(2, j)));
		from_outer_.assign(B.count(2), -1);
		for (std::size_t j = 0; j < to_outer_.size(); ++j)
			from_outer_[to_outer_[j]] = static_cast<std::int64_t>(j);
	}

	double nodes() const { return nodes_; }

	// Is there a chain of total positive support <= T joining p1 to p2?
	bool feasible(std::size_t p1, std::size_t p2, std::size_t T)
	{
		target_ = p2;
		for (int side = 0; side < 2; ++side)
			for (const Atom *a : atoms(side, p1, T))
				if (place(*a, T, 0))
					return true;
		return false;
	}

  private:
	const BoxLattice &B_, &Bp_;
	const GroupSpec &G_;
	double budget_;
	double nodes_ = 0;
	std::vector<std::uint8_t> used_[2];
	std::vector<std::uint16_t> cover_;
	std::vector<std::size_t> to_outer_;
	std::vector<std::int64_t> from_outer_;
	std::size_t target_ = 0;
	// (side, plaquette) -> atoms containing it, with the cap they were built for
	std::map<std::pair<int, std::size_t>, std::pair<std::size_t, std::vector<Atom>>> memo_;
	std::vector<const Atom *> scratch_;

	void charge(double n)
	{
		nodes_ += n;
		if (nodes_ > budget_)
			throw ResourceError("distance search exceeded its node budget", nodes_);
	}

	std::vector<const Atom *> atoms(int side, std::size_t q, std::size_t cap)
	{
		std::vector<const Atom *> out;
		if (side == 1 && from_outer_[q] < 0)
			return out;
		auto key = std::pair{side, q};
		auto it = memo_.find(key);
		if (it == memo_.end() || it->second.first < cap)
		{
			const BoxLattice &box = side ? Bp_ : B_;
			ClosureSearch s(box, G_);
			s.set_budget(std::max(1.0, budget_ - nodes_));
			std::set<std::vector<std::size_t>> seen;
			std::vector<Atom> list;
			std::size_t seed[1] = {side ? static_cast<std::size_t>(from_outer_[q]) : q};
			s.run(seed, cap, [&](std::span<const std::size_t> supp, std::span<const std::uint32_t>) {
				std::vector<std::size_t> outer;
				for (std::size_t j : supp)
					outer.push_back(side ? to_outer_[j] : j);
				std::sort(outer.begin(), outer.end());
				if (seen.insert(outer).second)
					list.push_back({side, std::move(outer)});
			});
			charge(s.nodes());
			memo_[key] = {cap, std::move(list)};
			it = memo_.find(key);
		}
		for (const Atom &a : it->second.second)
			if (a.support.size() <= cap)
				out.push_back(&a);
		return out;
	}

	bool place(const Atom &a, std::size_t T, std::size_t total)
	{
		charge(1);
		if (total + a.support.size() > T)
			return false;
		for (std::size_t q : a.support)
			if (used_[a.side][q])
				return false;
		for (std::size_t q : a.support)
		{
			used_[a.side][q] = 1;
			++cover_[q];
		}
		bool ok = cover_[target_] > 0;
		std::size_t now = total + a.support.size();
		if (!ok && now < T)
		{
			// plaquettes equal to or sharing a 3-cell with the atom
			std::set<std::size_t> touch;
			for (std::size_t q : a.support)
			{
				touch.insert(q);
				for (const Incidence &c : B_.cofaces(2, q))
					for (const Incidence &f : B_.faces(3, c.index))
						touch.insert(f.index);
			}
			std::set<std::pair<int, const std::vector<std::size_t> *>> tried;
			std::set<std::pair<int, std::vector<std::size_t>>> tried_supports;
			for (int side = 0; side < 2 && !ok; ++side)
				for (std::size_t q : touch)
				{
					if (ok)
						break;
					if (used_[side][q])
						continue;
					for (const Atom *b : atoms(side, q, T - now))
					{
						if (!tried_supports.insert({side, b->support}).second)
							continue;
						if (place(*b, T, now))
						{
							ok = true;
							break;
						}
					}
				}
		}
		for (std::size_t q : a.support)
		{
			used_[a.side][q] = 0;
			--cover_[q];
		}
		return ok;
	}
};

} // namespace

DistanceResult dist_config_bruteforce(const BoxLattice &B, const BoxLattice &Bp, const GroupSpec &G, const Cell &p1,
									  const Cell &p2, double budget)
{
	require_plaquette(B, p1, "p1");
	require_plaquette(B, p2, "p2");
	if (!B.contains(Bp))
		throw PreconditionError("B' must lie inside B");
	DistanceResult r;
	if (p1 == p2)
	{
		r.exact = true;
		r.value = r.lower = r.upper = 0;
		return r;
	}
	int star = dist_star(B, p1, p2);
	int upper = std::numeric_limits<int>::max();
	if (B == Bp)
	{
		auto path = dist_star_path(B, p1, p2);
		auto [w0, w1] = path_witness(B, G, path);
		int half = static_cast<int>(w0.positive_support_size() + w1.positive_support_size());
		VortexGraph g(w0, w1);
		if (g.component(p1) >= 0 && g.component(p1) == g.component(p2))
			upper = half;
	}

	ChainSearch search(B, Bp, G, budget);
	std::size_t i1 = B.index(p1), i2 = B.index(p2);
	std::size_t T = 1;
	try
	{
		for (;; ++T)
		{
			if (static_cast<int>(T) > upper)
			{
				// the witness itself is optimal
				r.exact = true;
				r.value = r.lower = r.upper = upper;
				break;
			}
			if (search.feasible(i1, i2, T))
			{
				r.exact = true;
				r.value = r.lower = r.upper = static_cast<int>(T);
				break;
			}
		}
	}
	catch (const ResourceError &)
	{
		r.exact = false;
		r.lower = std::max(star, static_cast<int>(T));
		r.upper = upper;
	}
	r.nodes = search.nodes();
	return r;
}

} // namespace lgt

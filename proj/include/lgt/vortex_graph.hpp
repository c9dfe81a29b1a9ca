#pragma once

#include "lgt/cell_complex.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace lgt {

// Oriented plaquette of a box as one integer: 2 * positive index + (sign < 0).
using PlaquetteId = std::uint32_t;

inline PlaquetteId plaquette_id(const BoxLattice &box, const Cell &p)
{
	return static_cast<PlaquetteId>(2 * box.index(p) + (p.sign < 0));
}
inline Cell plaquette_cell(const BoxLattice &box, PlaquetteId id)
{
	Cell c = box.cell(2, id / 2);
	return id & 1 ? -c : c;
}

// Oriented plaquettes q != p of the box with p and q in a common 3-cell
// (either orientation), plus -p. Sorted by id.
std::vector<PlaquetteId> plaquette_neighbours(const BoxLattice &box, PlaquetteId p);

// Two distinct oriented plaquettes share a 3-cell up to orientation.
bool plaquettes_adjacent(const Cell &a, const Cell &b, int n);

// G(omega, omega') on supp omega u supp omega'. omega lives on the box B,
// omega' on a box B' inside B; vertices are identified through B.
class VortexGraph
{
  public:
	VortexGraph(const DifferentialForm &omega, const DifferentialForm &omega_prime);
	explicit VortexGraph(const DifferentialForm &omega);

	const BoxLattice &box() const { return box_; }
	bool has_vertex(const Cell &p) const;
	std::size_t vertex_count() const; // oriented
	std::vector<Cell> vertices() const;
	bool adjacent(const Cell &a, const Cell &b) const;

	// Component label of a vertex (shared by p and -p), or -1.
	int component(const Cell &p) const;
	std::size_t component_count() const { return components_; }
	// Each component as its oriented plaquettes in canonical order.
	std::vector<std::vector<Cell>> component_sets() const;

	// Shortest path between two vertices inside the graph (BFS with
	// neighbours in canonical order); empty if none.
	std::vector<Cell> geodesic(const Cell &from, const Cell &to) const;

  private:
	BoxLattice box_;
	std::vector<std::uint8_t> in_;	// per positive plaquette of B
	std::vector<int> label_;		// per positive plaquette, -1 off the graph
	std::size_t components_ = 0;
};

// Some p1 in P1 and p2 in P2 lie in one component. P1, P2 must be disjoint.
bool connected(const VortexGraph &g, const CellSet &P1, const CellSet &P2);

// min |path| over paths in P_B from P1 to P2 (vertices counted).
int dist_star(const BoxLattice &box, const CellSet &P1, const CellSet &P2);
int dist_star(const BoxLattice &box, const Cell &p1, const Cell &p2);
// BFS distance from every oriented plaquette of the box to the set (1 on the set).
std::vector<int> dist_star_field(const BoxLattice &box, const CellSet &P);
// Canonical shortest path in P_B: BFS from p1, first discovery wins.
std::vector<Cell> dist_star_path(const BoxLattice &box, const Cell &p1, const Cell &p2);

bool is_path(const std::vector<Cell> &path, int n);
bool is_optimal_path(const std::vector<Cell> &path, int n);

// Result of the configuration distance search. When the search budget runs
// out, [lower, upper] is a certified interval instead of a value.
struct DistanceResult
{
	bool exact = false;
	int value = -1; // when exact
	int lower = 0;
	int upper = std::numeric_limits<int>::max(); // max() = no upper bound known
	double nodes = 0;
};

// dist_{B,B'}(p1, p2): half the least |supp omega| + |supp omega'| over
// closed omega on B, omega' on B' putting p1 and p2 in one component of
// G(omega, omega'). Iterative deepening over chains of minimal closed forms.
// When B' = B the upper end of an interval comes from path_witness on the
// canonical dist* path.
DistanceResult dist_config_bruteforce(const BoxLattice &B, const BoxLattice &Bp, const GroupSpec &G, const Cell &p1,
									  const Cell &p2, double budget = 2e6);

// Optimal paths (p1, ..., pm) in P_B with pm != +-p1.
std::uint64_t count_optimal_paths(const BoxLattice &box, const Cell &p1, int m);

// Closed forms omega0, omega1 on the box making the shortest path a path in
// G(omega0, omega1), with total support at most 12 |path|.
std::pair<DifferentialForm, DifferentialForm> path_witness(const BoxLattice &box, const GroupSpec &G,
														   const std::vector<Cell> &path);

// Flips the orientation of interior plaquettes so that p1..p_{m-1} share
// p1's orientation; the input must be a geodesic of g.
std::vector<Cell> optimalize_geodesic(const std::vector<Cell> &path, const VortexGraph &g);

// ---------------------------------------------------------------------------
// Closure search

// Grows closed 2-forms from a seed one plaquette at a time: the first 3-cell
// (canonical order) whose Bianchi sum is non-zero picks the next plaquette
// among its faces, and a branch that skips a face forbids it for good. A
// branch stops at its first closed support.
//
// Every closed nu containing the seed that has no proper closed
// sub-restriction containing the seed is reported exactly once.
class ClosureSearch
{
  public:
	ClosureSearch(BoxLattice box, GroupSpec group);

	const BoxLattice &box() const { return box_; }
	const GroupSpec &group() const { return group_; }

	// Plaquettes (positive index) that may join the support.
	void set_allowed(std::vector<std::uint8_t> allowed) { allowed_ = std::move(allowed); }
	// A plaquette joins with this value only (restricted mode); 0 forbids it.
	void set_values(std::vector<std::uint32_t> values) { values_ = std::move(values); }
	void set_budget(double nodes) { budget_ = nodes; }
	double nodes() const { return nodes_; }

	using Found = std::function<void(std::span<const std::size_t> support, std::span<const std::uint32_t> values)>;
	// Seed plaquettes take every non-zero value unless values are set.
	// Throws ResourceError when the node budget is exhausted.
	void run(std::span<const std::size_t> seed, std::size_t cap, const Found &found);

  private:
	BoxLattice box_;
	GroupSpec group_;
	std::vector<std::uint8_t> allowed_;
	std::vector<std::uint32_t> values_;
	double budget_ = 1e9;
	double nodes_ = 0;
};

// Every closed 2-form on the box containing the interior plaquette p with
// positive support at most cap (<= 11), candidates avoiding the boundary
// plaquettes of P_B. Sorted by size, then by support.
std::vector<DifferentialForm> minimal_vortex_census(const BoxLattice &box, const GroupSpec &G, const Cell &p,
													 std::size_t cap);

} // namespace lgt

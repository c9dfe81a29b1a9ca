#pragma once

#include "lgt/abelian_group.hpp"
#include "lgt/errors.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lgt {

inline constexpr int kMaxDim = 8;
using Point = std::array<int, kMaxDim>;

// Oriented k-cell dx_{i1} ^ ... ^ dx_{ik} at base (directions are bits of
// dirs). A dual cell dy_J at base lives at the dual vertex base + (1/2,...)
// and spans the negative coordinate directions in J.
struct Cell
{
	Point base{};
	std::uint8_t dirs = 0;
	std::int8_t sign = 1;
	bool dual = false;

	int degree() const;
	bool positive() const { return sign > 0; }
	Cell operator-() const
	{
		Cell c = *this;
		c.sign = static_cast<std::int8_t>(-sign);
		return c;
	}
	Cell positive_part() const
	{
		Cell c = *this;
		c.sign = 1;
		return c;
	}

	friend bool operator==(const Cell &, const Cell &) = default;
	friend auto operator<=>(const Cell &, const Cell &) = default;
};

Cell make_cell(std::initializer_list<int> base, std::initializer_list<int> dirs, int sign = 1);
std::vector<int> directions(const Cell &c);
std::string to_string(const Cell &c, int n);

// (k-1)-faces with the orientation they carry in dc (2k entries).
std::vector<Cell> boundary(const Cell &c);

// Every (k+1)-cell of Z^n having c in its boundary, oriented so that c
// appears with sign +1.
std::vector<Cell> coboundary(const Cell &c, int n);

Cell hodge_star(const Cell &c, int n);

// e1 ^ ... ^ ek for edges at a common base with distinct directions;
// empty when the edges do not build a cell.
std::optional<Cell> wedge(std::span<const Cell> edges);

struct Incidence
{
	std::uint32_t index;
	std::int8_t sign;
};

// Box [a1,b1] x ... x [an,bn] in Z^n with dense indexing of its positive
// cells. Within each degree, cells are ordered by direction set
// (lexicographic) and then by base point (lexicographic). This is the
// canonical cell order used throughout.
class BoxLattice
{
  public:
	explicit BoxLattice(std::vector<std::pair<int, int>> intervals);

	// "0..1,0..1,0..1,0..1"
	static BoxLattice parse(std::string_view text);
	// [0,w1] x ... x [0,wn]
	static BoxLattice cube(int n, int width);

	int dim() const { return n_; }
	const std::vector<std::pair<int, int>> &intervals() const { return data_->intervals; }
	std::string to_string() const;

	std::size_t count(int k) const;
	bool contains(const Point &x) const;
	bool contains(const Cell &c) const;
	bool contains(const BoxLattice &inner) const;

	// Index of the positive representative of c; throws if c is not in the box.
	std::size_t index(const Cell &c) const;
	std::optional<std::size_t> find(const Cell &c) const;
	Cell cell(int k, std::size_t i) const;

	// Faces of positive k-cell i (k >= 1) as (k-1)-cell indices with the
	// sign they carry in its boundary.
	std::span<const Incidence> faces(int k, std::size_t i) const;
	// In-box positive (k+1)-cells whose boundary contains positive k-cell i,
	// with the sign of i in that boundary.
	std::span<const Incidence> cofaces(int k, std::size_t i) const;

	friend bool operator==(const BoxLattice &a, const BoxLattice &b)
	{
		return a.data_->intervals == b.data_->intervals;
	}

  private:
	struct Block
	{
		std::uint8_t mask;
		std::size_t offset;
		std::size_t size;
		std::array<int, kMaxDim> extent;
		std::array<std::size_t, kMaxDim> stride;
	};
	struct Csr
	{
		std::vector<std::uint32_t> start;
		std::vector<Incidence> items;
	};
	struct Data
	{
		std::vector<std::pair<int, int>> intervals;
		std::vector<std::vector<Block>> blocks;		  // per degree
		std::vector<std::array<int, 256>> block_of;  // per degree, mask -> block
		std::vector<std::size_t> counts;
		std::vector<Csr> faces;   // index k: faces of k-cells
		std::vector<Csr> cofaces; // index k: cofaces of k-cells
	};

	int n_;
	std::shared_ptr<const Data> data_;

	std::optional<std::size_t> locate(const Point &base, std::uint8_t dirs) const;
};

// Set of oriented k-cells of a box.
class CellSet
{
  public:
	CellSet(BoxLattice box, int degree);

	static CellSet all(BoxLattice box, int degree);
	// Both orientations of the given positive indices.
	static CellSet symmetric_from(BoxLattice box, int degree, std::span<const std::size_t> positive);

	const BoxLattice &box() const { return box_; }
	int degree() const { return degree_; }

	void insert(const Cell &c);
	void erase(const Cell &c);
	bool contains(const Cell &c) const;
	// Flags for positive index i: bit 0 = +c present, bit 1 = -c present.
	std::uint8_t flags(std::size_t i) const { return flags_[i]; }
	void set_flags(std::size_t i, std::uint8_t f) { flags_[i] = f; }

	bool symmetric() const;
	bool empty() const;
	// Number of oriented cells.
	std::size_t size() const;
	// Positive indices with at least one orientation present.
	std::vector<std::size_t> positive_indices() const;
	std::vector<Cell> cells() const;

	CellSet operator|(const CellSet &o) const;
	CellSet operator&(const CellSet &o) const;
	CellSet operator-(const CellSet &o) const;
	friend bool operator==(const CellSet &a, const CellSet &b)
	{
		return a.degree_ == b.degree_ && a.box_ == b.box_ && a.flags_ == b.flags_;
	}

  private:
	BoxLattice box_;
	int degree_;
	std::vector<std::uint8_t> flags_;
};

// G-valued k-form on a box. Only positive cells are stored; f(-c) = -f(c).
class DifferentialForm
{
  public:
	DifferentialForm(BoxLattice box, GroupSpec group, int degree);

	const BoxLattice &box() const { return box_; }
	const GroupSpec &group() const { return group_; }
	int degree() const { return degree_; }

	// Zero for cells outside the box.
	GroupElement value(const Cell &c) const;
	GroupElement at(std::size_t i) const { return {codes_[i]}; }
	void set(const Cell &c, GroupElement g);
	void set(std::size_t i, GroupElement g);

	const std::vector<std::uint32_t> &codes() const { return codes_; }
	std::vector<std::uint32_t> &codes() { return codes_; }

	bool is_zero() const;
	CellSet support() const;
	std::vector<std::size_t> positive_support() const;
	std::size_t positive_support_size() const;

	DifferentialForm operator+(const DifferentialForm &o) const;
	DifferentialForm operator-(const DifferentialForm &o) const;
	DifferentialForm operator-() const;
	friend bool operator==(const DifferentialForm &a, const DifferentialForm &b)
	{
		return a.degree_ == b.degree_ && a.box_ == b.box_ && a.group_ == b.group_ && a.codes_ == b.codes_;
	}

  private:
	BoxLattice box_;
	GroupSpec group_;
	int degree_;
	std::vector<std::uint32_t> codes_;

	void check_compatible(const DifferentialForm &o) const;
};

// Thrown by anti_derivative for a 2-form that violates Bianchi somewhere.
class NotClosedError : public PreconditionError
{
  public:
	NotClosedError(const std::string &what, Cell witness) : PreconditionError(what), witness_(witness) {}
	const Cell &witness() const { return witness_; }

  private:
	Cell witness_;
};

// (df)_c = sum over c' in dc of f_{c'} for every (k+1)-cell c of the box.
DifferentialForm exterior_derivative(const DifferentialForm &f);
bool is_closed(const DifferentialForm &f);
// First (k+1)-cell of the box where df does not vanish.
std::optional<Cell> closedness_witness(const DifferentialForm &f);

// sigma with d sigma = omega, vanishing on the spanning tree of the box's
// vertex graph grown by BFS from the smallest vertex (neighbours visited in
// the order +e1, -e1, +e2, -e2, ...).
DifferentialForm anti_derivative(const DifferentialForm &omega);
// Flags over positive edges: 1 for edges of that spanning tree.
std::vector<std::uint8_t> spanning_tree_edges(const BoxLattice &box);

// Cells of P sharing a (k+1)-cell of Z^n with a k-cell outside P.
CellSet boundary_cells(const CellSet &P);

DifferentialForm restrict(const DifferentialForm &f, const CellSet &S);

// No symmetric P0 with P <= P0 < supp(nu) has d(nu|P0) = 0. Exhaustive over
// subsets; |supp nu|^+ is capped.
bool is_irreducible(const DifferentialForm &nu, const CellSet &P, std::size_t cap = 16);

} // namespace lgt

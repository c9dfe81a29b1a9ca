#include "lgt/cell_complex.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <deque>
#include <numeric>

namespace lgt {

namespace {

// Direction masks with k bits set, in lexicographic order of the sorted
// direction lists.
std::vector<std::uint8_t> masks_of_degree(int n, int k)
{
	std::vector<std::uint8_t> out;
	std::vector<int> pick(k);
	std::iota(pick.begin(), pick.end(), 0);
	if (k > n)
		return out;
	while (true)
	{
		std::uint8_t m = 0;
		for (int i : pick)
			m |= static_cast<std::uint8_t>(1u << i);
		out.push_back(m);
		int i = k - 1;
		while (i >= 0 && pick[i] == n - k + i)
			--i;
		if (i < 0)
			break;
		++pick[i];
		for (int j = i + 1; j < k; ++j)
			pick[j] = pick[j - 1] + 1;
	}
	return out;
}

// Sign of the permutation that sorts the concatenation (A, B) of two
// disjoint sorted direction sets.
int shuffle_sign(std::uint8_t a, std::uint8_t b)
{
	int inv = 0;
	for (int i = 0; i < 8; ++i)
		if (a >> i & 1)
			inv += std::popcount(static_cast<unsigned>(b & ((1u << i) - 1)));
	return inv % 2 ? -1 : 1;
}

} // namespace

int Cell::degree() const { return std::popcount(static_cast<unsigned>(dirs)); }

Cell make_cell(std::initializer_list<int> base, std::initializer_list<int> dirs, int sign)
{
	Cell c;
	if (base.size() > kMaxDim)
		throw DomainError("cell base has too many coordinates");
	std::copy(base.begin(), base.end(), c.base.begin());
	for (int d : dirs)
	{
		if (d < 0 || d >= kMaxDim || (c.dirs >> d & 1))
			throw DomainError("invalid cell direction list");
		c.dirs |= static_cast<std::uint8_t>(1u << d);
	}
	c.sign = static_cast<std::int8_t>(sign < 0 ? -1 : 1);
	return c;
}

std::vector<int> directions(const Cell &c)
{
	std::vector<int> d;
	for (int i = 0; i < kMaxDim; ++i)
		if (c.dirs >> i & 1)
			d.push_back(i);
	return d;
}

std::string to_string(const Cell &c, int n)
{
	std::string s = c.sign < 0 ? "-" : "";
	s += c.dual ? "dy" : "dx";
	s += '[';
	auto d = directions(c);
	for (std::size_t i = 0; i < d.size(); ++i)
		s += (i ? "," : "") + std::to_string(d[i]);
	s += "]@(";
	for (int i = 0; i < n; ++i)
		s += (i ? "," : "") + std::to_string(c.base[i]);
	return s + ")";
}

std::vector<Cell> boundary(const Cell &c)
{
	int k = c.degree();
	if (k < 1)
		throw PreconditionError("boundary of a 0-cell");
	std::vector<Cell> out;
	out.reserve(2 * k);
	int step = c.dual ? -1 : 1;
	int m = 0;
	for (int i = 0; i < kMaxDim; ++i)
	{
		if (!(c.dirs >> i & 1))
			continue;
		int s = (m % 2 ? -1 : 1) * c.sign;
		Cell far = c;
		far.dirs = static_cast<std::uint8_t>(c.dirs & ~(1u << i));
		far.base[i] += step;
		far.sign = static_cast<std::int8_t>(s);
		Cell near = far;
		near.base[i] -= step;
		near.sign = static_cast<std::int8_t>(-s);
		out.push_back(far);
		out.push_back(near);
		++m;
	}
	return out;
}

std::vector<Cell> coboundary(const Cell &c, int n)
{
	if (c.dual)
		throw PreconditionError("coboundary is only provided on the primal lattice");
	if (c.degree() >= n)
		throw PreconditionError("coboundary of a top-dimensional cell");
	std::vector<Cell> out;
	for (int i = 0; i < n; ++i)
	{
		if (c.dirs >> i & 1)
			continue;
		Cell hi;
		hi.base = c.base;
		hi.dirs = static_cast<std::uint8_t>(c.dirs | (1u << i));
		// position of i among the directions of the larger cell
		int m = std::popcount(static_cast<unsigned>(c.dirs & ((1u << i) - 1)));
		int s = m % 2 ? -1 : 1;
		// c is the far face of the cell based at x - e_i ...
		Cell lo = hi;
		lo.base[i] -= 1;
		lo.sign = static_cast<std::int8_t>(s * c.sign);
		// ... and the near face of the cell based at x
		hi.sign = static_cast<std::int8_t>(-s * c.sign);
		out.push_back(lo);
		out.push_back(hi);
	}
	return out;
}

Cell hodge_star(const Cell &c, int n)
{
	if (n < 1 || n > kMaxDim)
		throw DomainError("dimension out of range");
	std::uint8_t full = static_cast<std::uint8_t>((1u << n) - 1);
	if (c.dirs & ~full)
		throw DomainError("cell direction outside the lattice dimension");
	Cell out = c;
	out.dirs = static_cast<std::uint8_t>(full & ~c.dirs);
	out.dual = !c.dual;
	out.sign = static_cast<std::int8_t>(c.sign * shuffle_sign(c.dirs, out.dirs));
	return out;
}

std::optional<Cell> wedge(std::span<const Cell> edges)
{
	if (edges.empty())
		return std::nullopt;
	Cell out;
	out.base = edges[0].base;
	out.dual = edges[0].dual;
	int sign = 1;
	for (const Cell &e : edges)
	{
		if (e.degree() != 1 || e.base != out.base || e.dual != out.dual || (out.dirs & e.dirs))
			return std::nullopt;
		sign *= e.sign * shuffle_sign(out.dirs, e.dirs);
		out.dirs |= e.dirs;
	}
	out.sign = static_cast<std::int8_t>(sign);
	return out;
}

// ---------------------------------------------------------------------------
// BoxLattice

BoxLattice::BoxLattice(std::vector<std::pair<int, int>> intervals) : n_(static_cast<int>(intervals.size()))
{
	if (n_ < 1 || n_ > kMaxDim)
		throw DomainError("box dimension must be between 1 and " + std::to_string(kMaxDim));
	for (auto [a, b] : intervals)
		if (a >= b)
			throw DomainError("box interval " + std::to_string(a) + ".." + std::to_string(b) + " must have a < b");

	auto d = std::make_shared<Data>();
	d->intervals = std::move(intervals);
	d->blocks.resize(n_ + 1);
	d->block_of.resize(n_ + 1);
	d->counts.assign(n_ + 1, 0);
	for (int k = 0; k <= n_; ++k)
	{
		d->block_of[k].fill(-1);
		std::size_t off = 0;
		for (std::uint8_t m : masks_of_degree(n_, k))
		{
			Block b{};
			b.mask = m;
			b.offset = off;
			b.size = 1;
			for (int i = 0; i < n_; ++i)
			{
				int w = d->intervals[i].second - d->intervals[i].first;
				b.extent[i] = (m >> i & 1) ? w : w + 1;
			}
			for (int i = n_ - 1; i >= 0; --i)
			{
				b.stride[i] = b.size;
				b.size *= static_cast<std::size_t>(b.extent[i]);
			}
			d->block_of[k][m] = static_cast<int>(d->blocks[k].size());
			d->blocks[k].push_back(b);
			off += b.size;
		}
		d->counts[k] = off;
	}
	data_ = d;

	// incidence tables
	d->faces.resize(n_ + 1);
	d->cofaces.resize(n_ + 1);
	for (int k = 1; k <= n_; ++k)
	{
		Csr &f = d->faces[k];
		f.start.assign(d->counts[k] + 1, 0);
		f.items.reserve(d->counts[k] * 2 * k);
		for (std::size_t i = 0; i < d->counts[k]; ++i)
		{
			f.start[i] = static_cast<std::uint32_t>(f.items.size());
			for (const Cell &face : boundary(cell(k, i)))
				f.items.push_back({static_cast<std::uint32_t>(*locate(face.base, face.dirs)), face.sign});
		}
		f.start[d->counts[k]] = static_cast<std::uint32_t>(f.items.size());
	}
	for (int k = 0; k < n_; ++k)
	{
		Csr &c = d->cofaces[k];
		std::vector<std::vector<Incidence>> tmp(d->counts[k]);
		const Csr &f = d->faces[k + 1];
		for (std::size_t j = 0; j < d->counts[k + 1]; ++j)
			for (std::uint32_t t = f.start[j]; t < f.start[j + 1]; ++t)
				tmp[f.items[t].index].push_back({static_cast<std::uint32_t>(j), f.items[t].sign});
		c.start.assign(d->counts[k] + 1, 0);
		for (std::size_t i = 0; i < tmp.size(); ++i)
		{
			c.start[i] = static_cast<std::uint32_t>(c.items.size());
			c.items.insert(c.items.end(), tmp[i].begin(), tmp[i].end());
		}
		c.start[d->counts[k]] = static_cast<std::uint32_t>(c.items.size());
	}
}

BoxLattice BoxLattice::parse(std::string_view text)
{
	std::vector<std::pair<int, int>> iv;
	auto fail = [&] {
		return DomainError("malformed box '" + std::string(text) + "' (expected e.g. 0..1,0..1,0..1,0..1)");
	};
	std::size_t i = 0;
	auto num = [&](int &out) {
		auto [p, ec] = std::from_chars(text.data() + i, text.data() + text.size(), out);
		if (ec != std::errc() || p == text.data() + i)
			throw fail();
		i = static_cast<std::size_t>(p - text.data());
	};
	while (true)
	{
		int a, b;
		num(a);
		if (text.substr(i, 2) != "..")
			throw fail();
		i += 2;
		num(b);
		iv.emplace_back(a, b);
		if (i == text.size())
			break;
		if (text[i] != ',')
			throw fail();
		++i;
	}
	return BoxLattice(std::move(iv));
}

BoxLattice BoxLattice::cube(int n, int width)
{
	return BoxLattice(std::vector<std::pair<int, int>>(n, {0, width}));
}

std::string BoxLattice::to_string() const
{
	std::string s;
	for (auto [a, b] : data_->intervals)
	{
		if (!s.empty())
			s += ',';
		s += std::to_string(a) + ".." + std::to_string(b);
	}
	return s;
}

std::size_t BoxLattice::count(int k) const
{
	if (k < 0 || k > n_)
		return 0;
	return data_->counts[k];
}

bool BoxLattice::contains(const Point &x) const
{
	for (int i = 0; i < n_; ++i)
		if (x[i] < data_->intervals[i].first || x[i] > data_->intervals[i].second)
			return false;
	for (int i = n_; i < kMaxDim; ++i)
		if (x[i] != 0)
			return false;
	return true;
}

bool BoxLattice::contains(const Cell &c) const { return !c.dual && locate(c.base, c.dirs).has_value(); }

bool BoxLattice::contains(const BoxLattice &inner) const
{
	if (inner.n_ != n_)
		return false;
	for (int i = 0; i < n_; ++i)
		if (inner.intervals()[i].first < intervals()[i].first || inner.intervals()[i].second > intervals()[i].second)
			return false;
	return true;
}

std::optional<std::size_t> BoxLattice::locate(const Point &base, std::uint8_t dirs) const
{
	if (dirs >> n_)
		return std::nullopt;
	int k = std::popcount(static_cast<unsigned>(dirs));
	const Block &b = data_->blocks[k][data_->block_of[k][dirs]];
	std::size_t idx = 0;
	for (int i = 0; i < n_; ++i)
	{
		int r = base[i] - data_->intervals[i].first;
		if (r < 0 || r >= b.extent[i])
			return std::nullopt;
		idx += static_cast<std::size_t>(r) * b.stride[i];
	}
	for (int i = n_; i < kMaxDim; ++i)
		if (base[i] != 0)
			return std::nullopt;
	return b.offset + idx;
}

std::optional<std::size_t> BoxLattice::find(const Cell &c) const
{
	if (c.dual)
		return std::nullopt;
	return locate(c.base, c.dirs);
}

std::size_t BoxLattice::index(const Cell &c) const
{
	auto i = find(c);
	if (!i)
		throw PreconditionError("cell " + lgt::to_string(c, n_) + " is not in box " + to_string());
	return *i;
}

Cell BoxLattice::cell(int k, std::size_t i) const
{
	if (k < 0 || k > n_ || i >= data_->counts[k])
		throw PreconditionError("cell index out of range");
	const auto &blocks = data_->blocks[k];
	auto it = std::upper_bound(blocks.begin(), blocks.end(), i,
							   [](std::size_t v, const Block &b) { return v < b.offset; });
	const Block &b = *(it - 1);
	std::size_t r = i - b.offset;
	Cell c;
	c.dirs = b.mask;
	for (int j = 0; j < n_; ++j)
	{
		c.base[j] = data_->intervals[j].first + static_cast<int>(r / b.stride[j]);
		r %= b.stride[j];
	}
	return c;
}

std::span<const Incidence> BoxLattice::faces(int k, std::size_t i) const
{
	if (k < 1 || k > n_)
		throw PreconditionError("faces need 1 <= k <= n");
	const Csr &f = data_->faces[k];
	return {f.items.data() + f.start[i], f.items.data() + f.start[i + 1]};
}

std::span<const Incidence> BoxLattice::cofaces(int k, std::size_t i) const
{
	if (k < 0 || k >= n_)
		throw PreconditionError("cofaces need 0 <= k < n");
	const Csr &f = data_->cofaces[k];
	return {f.items.data() + f.start[i], f.items.data() + f.start[i + 1]};
}

// ---------------------------------------------------------------------------
// CellSet

CellSet::CellSet(BoxLattice box, int degree) : box_(std::move(box)), degree_(degree)
{
	if (degree < 0 || degree > box_.dim())
		throw PreconditionError("cell degree out of range");
	flags_.assign(box_.count(degree), 0);
}

CellSet CellSet::all(BoxLattice box, int degree)
{
	CellSet s(std::move(box), degree);
	std::fill(s.flags_.begin(), s.flags_.end(), 3);
	return s;
}

CellSet CellSet::symmetric_from(BoxLattice box, int degree, std::span<const std::size_t> positive)
{
	CellSet s(std::move(box), degree);
	for (std::size_t i : positive)
		s.flags_.at(i) = 3;
	return s;
}

void CellSet::insert(const Cell &c)
{
	if (c.degree() != degree_)
		throw PreconditionError("cell degree does not match set");
	flags_[box_.index(c)] |= c.sign > 0 ? 1 : 2;
}

void CellSet::erase(const Cell &c)
{
	if (auto i = box_.find(c); i && c.degree() == degree_)
		flags_[*i] &= static_cast<std::uint8_t>(~(c.sign > 0 ? 1 : 2));
}

bool CellSet::contains(const Cell &c) const
{
	if (c.degree() != degree_)
		return false;
	auto i = box_.find(c);
	return i && (flags_[*i] & (c.sign > 0 ? 1 : 2));
}

bool CellSet::symmetric() const
{
	return std::all_of(flags_.begin(), flags_.end(), [](std::uint8_t f) { return f == 0 || f == 3; });
}

bool CellSet::empty() const
{
	return std::all_of(flags_.begin(), flags_.end(), [](std::uint8_t f) { return f == 0; });
}

std::size_t CellSet::size() const
{
	std::size_t n = 0;
	for (auto f : flags_)
		n += std::popcount(static_cast<unsigned>(f));
	return n;
}

std::vector<std::size_t> CellSet::positive_indices() const
{
	std::vector<std::size_t> v;
	for (std::size_t i = 0; i < flags_.size(); ++i)
		if (flags_[i])
			v.push_back(i);
	return v;
}

std::vector<Cell> CellSet::cells() const
{
	std::vector<Cell> v;
	for (std::size_t i = 0; i < flags_.size(); ++i)
	{
		if (flags_[i] & 1)
			v.push_back(box_.cell(degree_, i));
		if (flags_[i] & 2)
			v.push_back(-box_.cell(degree_, i));
	}
	return v;
}

CellSet CellSet::operator|(const CellSet &o) const
{
	CellSet r = *this;
	for (std::size_t i = 0; i < flags_.size(); ++i)
		r.flags_[i] |= o.flags_.at(i);
	return r;
}

CellSet CellSet::operator&(const CellSet &o) const
{
	CellSet r = *this;
	for (std::size_t i = 0; i < flags_.size(); ++i)
		r.flags_[i] &= o.flags_.at(i);
	return r;
}

CellSet CellSet::operator-(const CellSet &o) const
{
	CellSet r = *this;
	for (std::size_t i = 0; i < flags_.size(); ++i)
		r.flags_[i] &= static_cast<std::uint8_t>(~o.flags_.at(i));
	return r;
}

// ---------------------------------------------------------------------------
// DifferentialForm

DifferentialForm::DifferentialForm(BoxLattice box, GroupSpec group, int degree)
	: box_(std::move(box)), group_(std::move(group)), degree_(degree)
{
	if (degree < 0 || degree > box_.dim())
		throw PreconditionError("form degree out of range");
	codes_.assign(box_.count(degree), 0);
}

GroupElement DifferentialForm::value(const Cell &c) const
{
	if (c.degree() != degree_)
		throw PreconditionError("cell degree does not match form degree");
	auto i = box_.find(c);
	if (!i)
		return {};
	std::uint32_t v = codes_[*i];
	return {c.sign > 0 ? v : group_.neg_code(v)};
}

void DifferentialForm::set(const Cell &c, GroupElement g)
{
	if (c.degree() != degree_)
		throw PreconditionError("cell degree does not match form degree");
	g = group_.element(g.code);
	codes_[box_.index(c)] = c.sign > 0 ? g.code : group_.neg_code(g.code);
}

void DifferentialForm::set(std::size_t i, GroupElement g) { codes_.at(i) = group_.element(g.code).code; }

bool DifferentialForm::is_zero() const
{
	return std::all_of(codes_.begin(), codes_.end(), [](std::uint32_t c) { return c == 0; });
}

CellSet DifferentialForm::support() const { return CellSet::symmetric_from(box_, degree_, positive_support()); }

std::vector<std::size_t> DifferentialForm::positive_support() const
{
	std::vector<std::size_t> v;
	for (std::size_t i = 0; i < codes_.size(); ++i)
		if (codes_[i])
			v.push_back(i);
	return v;
}

std::size_t DifferentialForm::positive_support_size() const
{
	return static_cast<std::size_t>(std::count_if(codes_.begin(), codes_.end(), [](std::uint32_t c) { return c != 0; }));
}

void DifferentialForm::check_compatible(const DifferentialForm &o) const
{
	if (o.degree_ != degree_ || !(o.box_ == box_) || !(o.group_ == group_))
		throw PreconditionError("forms live on different boxes, groups or degrees");
}

DifferentialForm DifferentialForm::operator+(const DifferentialForm &o) const
{
	check_compatible(o);
	DifferentialForm r = *this;
	for (std::size_t i = 0; i < codes_.size(); ++i)
		r.codes_[i] = group_.add_code(codes_[i], o.codes_[i]);
	return r;
}

DifferentialForm DifferentialForm::operator-() const
{
	DifferentialForm r = *this;
	for (auto &c : r.codes_)
		c = group_.neg_code(c);
	return r;
}

DifferentialForm DifferentialForm::operator-(const DifferentialForm &o) const { return *this + (-o); }

// ---------------------------------------------------------------------------
// calculus

DifferentialForm exterior_derivative(const DifferentialForm &f)
{
	const BoxLattice &box = f.box();
	int k = f.degree();
	if (k >= box.dim())
		throw PreconditionError("exterior derivative of a top-degree form");
	const GroupSpec &G = f.group();
	DifferentialForm out(box, G, k + 1);
	auto &dst = out.codes();
	const auto &src = f.codes();
	for (std::size_t j = 0; j < dst.size(); ++j)
	{
		std::uint32_t s = 0;
		for (const Incidence &in : box.faces(k + 1, j))
		{
			std::uint32_t v = src[in.index];
			s = G.add_code(s, in.sign > 0 ? v : G.neg_code(v));
		}
		dst[j] = s;
	}
	return out;
}

std::optional<Cell> closedness_witness(const DifferentialForm &f)
{
	if (f.degree() >= f.box().dim())
		return std::nullopt;
	DifferentialForm df = exterior_derivative(f);
	for (std::size_t j = 0; j < df.codes().size(); ++j)
		if (df.codes()[j])
			return f.box().cell(f.degree() + 1, j);
	return std::nullopt;
}

bool is_closed(const DifferentialForm &f) { return !closedness_witness(f).has_value(); }

std::vector<std::uint8_t> spanning_tree_edges(const BoxLattice &box)
{
	int n = box.dim();
	std::vector<std::uint8_t> tree(box.count(1), 0);
	std::vector<std::uint8_t> seen(box.count(0), 0);
	std::deque<std::size_t> queue{0}; // vertex 0 is the smallest point
	seen[0] = 1;
	while (!queue.empty())
	{
		Cell v = box.cell(0, queue.front());
		queue.pop_front();
		for (int i = 0; i < n; ++i)
			for (int dir : {+1, -1})
			{
				Cell w = v;
				w.base[i] += dir;
				auto wi = box.find(w);
				if (!wi || seen[*wi])
					continue;
				seen[*wi] = 1;
				Cell e;
				e.base = dir > 0 ? v.base : w.base;
				e.dirs = static_cast<std::uint8_t>(1u << i);
				tree[box.index(e)] = 1;
				queue.push_back(*wi);
			}
	}
	return tree;
}

DifferentialForm anti_derivative(const DifferentialForm &omega)
{
	if (omega.degree() != 2)
		throw PreconditionError("anti_derivative expects a 2-form");
	if (auto w = closedness_witness(omega))
		throw NotClosedError("2-form is not closed: Bianchi fails on " + to_string(*w, omega.box().dim()), *w);

	const BoxLattice &box = omega.box();
	const GroupSpec &G = omega.group();
	const auto &iv = box.intervals();

	// Axial solution first: direction-j edges vanish whenever every
	// coordinate before j sits at its lower end. Every other edge is fixed
	// by the plaquette dx_i ^ dx_j at x - e_i, i the first coordinate above
	// its lower end; edges are processed by direction, then base point.
	DifferentialForm sigma(box, G, 1);
	for (std::size_t idx = 0; idx < box.count(1); ++idx)
	{
		Cell e = box.cell(1, idx);
		int j = std::countr_zero(static_cast<unsigned>(e.dirs));
		int i = -1;
		for (int t = 0; t < j; ++t)
			if (e.base[t] > iv[t].first)
			{
				i = t;
				break;
			}
		if (i < 0)
			continue;
		Cell q;
		q.base = e.base;
		q.base[i] -= 1;
		q.dirs = static_cast<std::uint8_t>((1u << i) | (1u << j));
		// dq = dx_i@(x-e_i) + dx_j@x - dx_i@(x-e_i+e_j) - dx_j@(x-e_i)
		Cell a = q, b = q, c = q;
		a.dirs = b.dirs = static_cast<std::uint8_t>(1u << i);
		b.base[j] += 1;
		c.dirs = static_cast<std::uint8_t>(1u << j);
		GroupElement v = omega.value(q);
		v = G.sub(v, sigma.value(a));
		v = G.add(v, sigma.value(b));
		v = G.add(v, sigma.value(c));
		sigma.set(idx, v);
	}

	// Gauge transform onto the BFS tree: h(root) = 0 and h propagated along
	// the tree so that sigma - dh vanishes there.
	auto tree = spanning_tree_edges(box);
	std::vector<std::uint32_t> h(box.count(0), 0);
	std::vector<std::uint8_t> seen(box.count(0), 0);
	std::deque<std::size_t> queue{0};
	seen[0] = 1;
	while (!queue.empty())
	{
		std::size_t v = queue.front();
		queue.pop_front();
		for (const Incidence &in : box.cofaces(0, v))
		{
			if (!tree[in.index])
				continue;
			// edge e = (tail -> head); v appears with sign -1 at the tail
			for (const Incidence &end : box.faces(1, in.index))
			{
				if (end.index == v || seen[end.index])
					continue;
				seen[end.index] = 1;
				std::uint32_t s = sigma.codes()[in.index];
				// (dh)_e = h(head) - h(tail) must equal sigma_e
				h[end.index] = in.sign < 0 ? G.add_code(h[v], s) : G.add_code(h[v], G.neg_code(s));
				queue.push_back(end.index);
			}
		}
	}
	DifferentialForm dh(box, G, 1);
	DifferentialForm h0(box, G, 0);
	h0.codes() = h;
	dh = exterior_derivative(h0);
	return sigma - dh;
}

CellSet boundary_cells(const CellSet &P)
{
	if (!P.symmetric())
		throw PreconditionError("boundary_cells expects a symmetric set");
	const BoxLattice &box = P.box();
	int n = box.dim();
	int k = P.degree();
	CellSet out(box, k);
	if (k >= n)
		return out;
	for (std::size_t i : P.positive_indices())
	{
		Cell c = box.cell(k, i);
		bool inside = true;
		for (const Cell &hi : coboundary(c, n))
		{
			for (const Cell &face : boundary(hi))
			{
				auto j = box.find(face);
				if (!j || !(P.flags(*j)))
				{
					inside = false;
					break;
				}
			}
			if (!inside)
				break;
		}
		if (!inside)
			out.set_flags(i, 3);
	}
	return out;
}

DifferentialForm restrict(const DifferentialForm &f, const CellSet &S)
{
	if (!S.symmetric())
		throw PreconditionError("restrict expects a symmetric set");
	if (S.degree() != f.degree() || !(S.box() == f.box()))
		throw PreconditionError("restriction set does not match the form");
	DifferentialForm r = f;
	for (std::size_t i = 0; i < r.codes().size(); ++i)
		if (!S.flags(i))
			r.codes()[i] = 0;
	return r;
}

bool is_irreducible(const DifferentialForm &nu, const CellSet &P, std::size_t cap)
{
	if (!P.symmetric())
		throw PreconditionError("is_irreducible expects a symmetric set P");
	const BoxLattice &box = nu.box();
	const GroupSpec &G = nu.group();
	int k = nu.degree();
	auto supp = nu.positive_support();
	if (supp.size() > cap)
		throw ResourceError("irreducibility search over " + std::to_string(supp.size()) +
								" positive support cells exceeds cap " + std::to_string(cap),
							std::ldexp(1.0, static_cast<int>(supp.size())));
	std::vector<std::size_t> free;
	for (std::size_t i : P.positive_indices())
		if (!nu.codes()[i])
			throw PreconditionError("P must be contained in the support of nu");
	for (std::size_t i : supp)
		if (!P.flags(i))
			free.push_back(i);
	if (k >= box.dim())
		return free.empty();

	// (k+1)-cells touching the support
	std::vector<std::size_t> touched;
	for (std::size_t i : supp)
		for (const Incidence &in : box.cofaces(k, i))
			touched.push_back(in.index);
	std::sort(touched.begin(), touched.end());
	touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

	std::vector<std::uint8_t> keep(nu.codes().size(), 0);
	for (std::size_t i : P.positive_indices())
		keep[i] = 1;
	std::uint64_t subsets = std::uint64_t{1} << free.size();
	for (std::uint64_t m = 0; m + 1 < subsets; ++m) // m = all bits is supp itself
	{
		for (std::size_t t = 0; t < free.size(); ++t)
			keep[free[t]] = static_cast<std::uint8_t>(m >> t & 1);
		bool closed = true;
		for (std::size_t c : touched)
		{
			std::uint32_t s = 0;
			for (const Incidence &in : box.faces(k + 1, c))
			{
				if (!keep[in.index])
					continue;
				std::uint32_t v = nu.codes()[in.index];
				s = G.add_code(s, in.sign > 0 ? v : G.neg_code(v));
			}
			if (s)
			{
				closed = false;
				break;
			}
		}
		if (closed)
			return false;
	}
	return true;
}

} // namespace lgt

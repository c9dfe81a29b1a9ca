#include "lgt/estimators.hpp"

#include "lgt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lgt {

namespace {

constexpr double kSupNormLimit = 16777216.0; // 2^24 restricted configurations

void require_same_box(const BoxLattice &a, const BoxLattice &b, const char *what)
{
	if (!(a == b))
		throw PreconditionError(std::string(what) + ": boxes differ");
}

std::uint32_t oriented_code(const GroupSpec &G, const Cell &p, std::uint32_t code)
{
	return p.sign < 0 ? G.neg_code(code) : code;
}

bool disjoint(const std::vector<std::size_t> &a, const std::vector<std::size_t> &b)
{
	for (std::size_t i : a)
		if (std::find(b.begin(), b.end(), i) != b.end())
			return false;
	return true;
}

// Unpacks a restricted_marginal key.
void unpack_into(const PlaquetteCodec &codec, std::uint64_t key, std::vector<std::uint32_t> &out)
{
	codec.unpack(key, out.data());
}

double five_alpha_tail(double a)
{
	return std::pow(5.0 * a, 11) / (1.0 - 5.0 * a);
}

CellSet oriented(const BoxLattice &box, const Cell &p)
{
	CellSet s(box, 2);
	s.insert(p);
	s.insert(-p);
	return s;
}

double welford_se(double sum, double sum_sq, double n)
{
	if (n < 2)
		return 0;
	double mean = sum / n;
	double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
	return std::sqrt(var / n);
}

} // namespace

// ---------------------------------------------------------------------------
// LocalFunction

LocalFunction::LocalFunction(BoxLattice box, GroupSpec group, std::vector<std::size_t> plaquettes, Rule rule)
	: box_(std::move(box)), group_(std::move(group)), plaquettes_(std::move(plaquettes)), rule_(std::move(rule))
{
	for (std::size_t p : plaquettes_)
		if (p >= box_.count(2))
			throw PreconditionError("local function plaquette outside the box");
	double configs = std::pow(static_cast<double>(group_.order()), static_cast<double>(plaquettes_.size()));
	if (configs > kSupNormLimit)
		throw ResourceError("sup norm over too many restricted configurations", configs);
	// mixed-radix odometer over G^k
	std::vector<std::uint32_t> codes(plaquettes_.size(), 0);
	while (true)
	{
		sup_ = std::max(sup_, std::abs(rule_(codes)));
		std::size_t j = 0;
		while (j < codes.size() && ++codes[j] == group_.order())
			codes[j++] = 0;
		if (j == codes.size())
			break;
	}
}

LocalFunction LocalFunction::at_plaquette(const BoxLattice &box, const GroupSpec &G, const Cell &p, PlaquetteFunction f)
{
	Cell q = p;
	return LocalFunction(box, G, {box.index(p)}, [G, q, f](std::span<const std::uint32_t> c) {
		return f(G.element(oriented_code(G, q, c[0])));
	});
}

LocalFunction LocalFunction::trace_at(const BoxLattice &box, const GroupSpec &G, const Cell &p)
{
	return at_plaquette(box, G, p, [G](GroupElement g) { return tr_rho(G, g); });
}

LocalFunction LocalFunction::constant(const BoxLattice &box, const GroupSpec &G, Complex value)
{
	return LocalFunction(box, G, {}, [value](std::span<const std::uint32_t>) { return value; });
}

CellSet LocalFunction::support() const
{
	return CellSet::symmetric_from(box_, 2, plaquettes_);
}

Complex LocalFunction::operator()(const DifferentialForm &omega) const
{
	require_same_box(omega.box(), box_, "local function");
	return (*this)(omega.codes());
}

Complex LocalFunction::operator()(std::span<const std::uint32_t> omega_codes) const
{
	std::vector<std::uint32_t> r(plaquettes_.size());
	for (std::size_t k = 0; k < r.size(); ++k)
		r[k] = omega_codes[plaquettes_[k]];
	return rule_(r);
}

// ---------------------------------------------------------------------------
// Reports

nlohmann::json BoundReport::to_json() const
{
	nlohmann::json j;
	j["theorem"] = name;
	j["lhs"] = lhs;
	j["rhs"] = rhs;
	j["satisfied"] = satisfied;
	j["preconditions_met"] = preconditions_met;
	j["inputs"] = inputs;
	return j;
}

BoundReport make_report(std::string name, double lhs, double rhs, bool preconditions_met, nlohmann::json inputs)
{
	BoundReport r;
	r.name = std::move(name);
	r.lhs = lhs;
	r.rhs = rhs;
	r.satisfied = lhs <= rhs + 1e-12;
	r.preconditions_met = preconditions_met;
	r.inputs = std::move(inputs);
	return r;
}

// ---------------------------------------------------------------------------
// Covariances

Complex covariance_exact(const ExactDistribution &dist, const LocalFunction &f1, const LocalFunction &f2)
{
	require_same_box(dist.box(), f1.box(), "covariance");
	require_same_box(dist.box(), f2.box(), "covariance");
	if (!disjoint(f1.plaquettes(), f2.plaquettes()))
		throw PreconditionError("covariance needs disjoint supports");

	std::vector<std::size_t> joint = f1.plaquettes();
	joint.insert(joint.end(), f2.plaquettes().begin(), f2.plaquettes().end());
	const std::size_t k1 = f1.plaquettes().size();
	auto marginal = restricted_marginal(dist, joint);
	PlaquetteCodec codec(dist.group(), joint.size());

	// shifted by the first values so that a constant factor cancels exactly
	Complex e12 = 0, e1 = 0, e2 = 0, a0, b0;
	double total = 0;
	bool first = true;
	std::vector<std::uint32_t> codes(joint.size());
	for (const auto &[key, m] : marginal)
	{
		unpack_into(codec, key, codes);
		Complex a = f1.restricted(std::span(codes).first(k1));
		Complex b = f2.restricted(std::span(codes).subspan(k1));
		if (first)
		{
			a0 = a;
			b0 = b;
			first = false;
		}
		a -= a0;
		b -= b0;
		e12 += m * a * b;
		e1 += m * a;
		e2 += m * b;
		total += m;
	}
	return e12 / total - (e1 / total) * (e2 / total);
}

McmcEstimate covariance_mcmc(ChainState chain, const LocalFunction &f1, const LocalFunction &f2, std::size_t samples,
							 int burnin, int thin, std::size_t batches)
{
	if (samples == 0)
		throw PreconditionError("covariance_mcmc needs at least one sample");
	if (batches < 2 || batches > samples)
		throw PreconditionError("batch count must lie in [2, samples]");
	if (!disjoint(f1.plaquettes(), f2.plaquettes()))
		throw PreconditionError("covariance needs disjoint supports");

	McmcEstimate out;
	out.samples = samples;
	out.alpha_warning = 30.0 * alpha(chain.group(), chain.beta()) >= 1.0;

	ChainSampler sampler(std::move(chain), burnin, thin);
	const std::size_t per = samples / batches;
	Complex s1 = 0, s2 = 0, s12 = 0;
	std::vector<Complex> batch_cov;
	Complex b1 = 0, b2 = 0, b12 = 0;
	std::size_t in_batch = 0;
	for (std::size_t i = 0; i < samples; ++i)
	{
		DifferentialForm w = sampler.draw();
		Complex a = f1(w), b = f2(w);
		s1 += a;
		s2 += b;
		s12 += a * b;
		b1 += a;
		b2 += b;
		b12 += a * b;
		if (++in_batch == per && batch_cov.size() < batches)
		{
			double n = static_cast<double>(per);
			batch_cov.push_back(b12 / n - (b1 / n) * (b2 / n));
			b1 = b2 = b12 = 0;
			in_batch = 0;
		}
	}
	double n = static_cast<double>(samples);
	out.value = s12 / n - (s1 / n) * (s2 / n);

	Complex mean = 0;
	for (Complex c : batch_cov)
		mean += c;
	mean /= static_cast<double>(batch_cov.size());
	double var = 0;
	for (Complex c : batch_cov)
		var += std::norm(c - mean);
	var /= static_cast<double>(batch_cov.size() - 1);
	out.standard_error = std::sqrt(var / static_cast<double>(batch_cov.size()));
	return out;
}

// ---------------------------------------------------------------------------
// Spin expectation

Complex spin_leading_order(const GroupSpec &G, const Cell &, const PlaquetteFunction &f, double beta)
{
	if (!(beta >= 0))
		throw DomainError("beta must be non-negative");
	Complex f0 = f(G.zero());
	Complex s = 0;
	for (GroupElement g : G.elements())
		if (!g.is_zero())
			s += (f(g) - f0) * std::pow(phi_beta(G, g, beta), 12);
	return f0 + 4.0 * s;
}

double max_deviation(const GroupSpec &G, const PlaquetteFunction &f)
{
	Complex f0 = f(G.zero());
	double m = 0;
	for (GroupElement g : G.elements())
		m = std::max(m, std::abs(f(g) - f0));
	return m;
}

double sup_norm(const GroupSpec &G, const PlaquetteFunction &f)
{
	double m = 0;
	for (GroupElement g : G.elements())
		m = std::max(m, std::abs(f(g)));
	return m;
}

Complex plaquette_expectation(const ExactDistribution &dist, const Cell &p, const PlaquetteFunction &f)
{
	std::size_t i = dist.box().index(p);
	std::vector<std::size_t> one{i};
	auto marginal = restricted_marginal(dist, one);
	// f(0) + sum_g (f(g) - f(0)) mu(omega_p = g), exact for constant f
	const GroupSpec &G = dist.group();
	Complex f0 = f(G.zero());
	Complex e = f0;
	for (const auto &[code, m] : marginal)
		if (code)
			e += m * (f(G.element(oriented_code(G, p, static_cast<std::uint32_t>(code)))) - f0);
	return e;
}

int distance_to_boundary(const BoxLattice &box, const CellSet &P)
{
	CellSet bd = boundary_cells(CellSet::all(box, 2));
	if (!(P & bd).empty())
		return 1;
	if (bd.empty())
		return std::numeric_limits<int>::max();
	return dist_star(box, P, bd);
}

// ---------------------------------------------------------------------------
// Theorems

BoundReport theorem11_report(const ExactDistribution &dist, const LocalFunction &f1, const LocalFunction &f2)
{
	const GroupSpec &G = dist.group();
	CouplingParams cp(G, dist.beta());
	if (!cp.c1_defined())
		throw PreconditionError("theorem 1.1 needs 30 alpha < 1");
	Complex cov = covariance_exact(dist, f1, f2);
	int d = dist_star(dist.box(), f1.support(), f2.support());
	double rhs = cp.c1 * f1.sup_norm() * f2.sup_norm() * std::pow(cp.c2 * cp.alpha, d);
	nlohmann::json in{{"group", G.to_string()},
					  {"box", dist.box().to_string()},
					  {"beta", dist.beta()},
					  {"alpha", cp.alpha},
					  {"c1", cp.c1},
					  {"c2", cp.c2},
					  {"dist_star", d},
					  {"norm1", f1.sup_norm()},
					  {"norm2", f2.sup_norm()},
					  {"cov_re", cov.real()},
					  {"cov_im", cov.imag()}};
	return make_report("1.1", std::abs(cov), rhs, true, std::move(in));
}

BoundReport theorem12_report(const BoxLattice &box, const GroupSpec &G, double beta, const Cell &p,
							 const PlaquetteFunction &f, Complex expectation)
{
	double a = alpha(G, beta);
	if (5.0 * a >= 1.0)
		throw PreconditionError("theorem 1.2 needs 5 alpha < 1");
	Complex lead = spin_leading_order(G, p, f, beta);
	double dev = max_deviation(G, f);
	double rhs = five_alpha_tail(a) * dev;
	int d = distance_to_boundary(box, oriented(box, p));
	nlohmann::json in{{"group", G.to_string()}, {"box", box.to_string()},		{"beta", beta},
					  {"alpha", a},				{"plaquette", to_string(p, box.dim())}, {"dist_star_boundary", d},
					  {"max_deviation", dev},	{"leading_re", lead.real()},	{"leading_im", lead.imag()}};
	return make_report("1.2", std::abs(expectation - lead), rhs, d > 11, std::move(in));
}

BoundReport theorem12_report(const ExactDistribution &dist, const Cell &p, const PlaquetteFunction &f)
{
	return theorem12_report(dist.box(), dist.group(), dist.beta(), p, f, plaquette_expectation(dist, p, f));
}

BoundReport theorem13_report(const ExactDistribution &dist, const Cell &p1, const Cell &p2, const PlaquetteFunction &f1,
							 const PlaquetteFunction &f2)
{
	const GroupSpec &G = dist.group();
	const BoxLattice &box = dist.box();
	CouplingParams cp(G, dist.beta());
	if (!cp.c1_defined())
		throw PreconditionError("theorem 1.3 needs 30 alpha < 1");
	std::size_t i1 = box.index(p1), i2 = box.index(p2);
	if (i1 == i2)
		throw PreconditionError("theorem 1.3 needs distinct plaquettes");

	std::vector<std::size_t> joint{i1, i2};
	auto marginal = restricted_marginal(dist, joint);
	PlaquetteCodec codec(G, 2);
	std::vector<std::uint32_t> c(2);
	Complex e = 0;
	for (const auto &[key, m] : marginal)
	{
		codec.unpack(key, c.data());
		e += m * f1(G.element(oriented_code(G, p1, c[0]))) * f2(G.element(oriented_code(G, p2, c[1])));
	}
	Complex lead = spin_leading_order(G, p1, f1, dist.beta()) * spin_leading_order(G, p2, f2, dist.beta());

	double n1 = sup_norm(G, f1), n2 = sup_norm(G, f2);
	int d = dist_star(box, oriented(box, p1), oriented(box, p2));
	double rhs = cp.c1 * n1 * n2 * std::pow(cp.c2 * cp.alpha, d) + 8.0 * n1 * n2 * five_alpha_tail(cp.alpha);
	int db = distance_to_boundary(box, oriented(box, p1) | oriented(box, p2));
	nlohmann::json in{{"group", G.to_string()}, {"box", box.to_string()}, {"beta", dist.beta()},
					  {"alpha", cp.alpha},		{"c1", cp.c1},				 {"dist_star", d},
					  {"dist_star_boundary", db}, {"norm1", n1},			 {"norm2", n2}};
	return make_report("1.3", std::abs(e - lead), rhs, db > 11, std::move(in));
}

double tv_restriction_exact(const ExactDistribution &outer, const ExactDistribution &inner,
							std::span<const std::size_t> inner_plaquettes)
{
	const BoxLattice &B = outer.box(), &Bp = inner.box();
	if (!(outer.group() == inner.group()))
		throw PreconditionError("tv_restriction_exact: groups differ");
	if (!B.contains(Bp))
		throw PreconditionError("tv_restriction_exact: inner box not inside the outer box");
	std::vector<std::size_t> mapped;
	for (std::size_t i : inner_plaquettes)
		mapped.push_back(B.index(Bp.cell(2, i)));
	auto a = restricted_marginal(outer, mapped);
	auto b = restricted_marginal(inner, inner_plaquettes);
	for (const auto &kv : a)
		b.try_emplace(kv.first, 0.0);
	double tv = 0;
	for (const auto &[k, m] : b)
	{
		auto it = a.find(k);
		tv += std::abs((it == a.end() ? 0.0 : it->second) - m);
	}
	return tv / 2;
}

double tv_restriction_exact(const BoxLattice &B, const BoxLattice &Bp, std::span<const std::size_t> inner_plaquettes,
							const GroupSpec &G, double beta, double budget)
{
	ExactDistribution outer(B, G, beta, budget, 0);
	ExactDistribution inner(Bp, G, beta, budget);
	return tv_restriction_exact(outer, inner, inner_plaquettes);
}

CellSet outside_plaquettes(const BoxLattice &B, const BoxLattice &Bp)
{
	if (!B.contains(Bp))
		throw PreconditionError("inner box not inside the outer box");
	CellSet s(B, 2);
	for (std::size_t i = 0; i < B.count(2); ++i)
		if (!Bp.contains(B.cell(2, i)))
			s.set_flags(i, 3);
	return s;
}

BoundReport theorem14_report(const ExactDistribution &outer, const ExactDistribution &inner,
							 std::span<const std::size_t> inner_plaquettes)
{
	const BoxLattice &B = outer.box(), &Bp = inner.box();
	CouplingParams cp(outer.group(), outer.beta());
	if (!cp.c1_defined())
		throw PreconditionError("theorem 1.4 needs 30 alpha < 1");
	if (B == Bp)
		throw PreconditionError("theorem 1.4 needs a proper sub-box");
	if (inner.beta() != outer.beta())
		throw PreconditionError("theorem 1.4: both laws need the same beta");
	double tv = tv_restriction_exact(outer, inner, inner_plaquettes);
	CellSet P(B, 2);
	std::vector<std::string> names;
	for (std::size_t i : inner_plaquettes)
	{
		Cell c = Bp.cell(2, i);
		P.insert(c);
		P.insert(-c);
		names.push_back(to_string(c, B.dim()));
	}
	int d = dist_star(B, P, outside_plaquettes(B, Bp));
	double rhs = cp.c1 * static_cast<double>(P.size()) * std::pow(cp.c2 * cp.alpha, d);
	nlohmann::json in{{"group", outer.group().to_string()},
					  {"box", B.to_string()},
					  {"inner_box", Bp.to_string()},
					  {"beta", outer.beta()},
					  {"alpha", cp.alpha},
					  {"c1", cp.c1},
					  {"plaquettes", names},
					  {"oriented_size", P.size()},
					  {"dist_star", d}};
	return make_report("1.4", tv, rhs, true, std::move(in));
}

// ---------------------------------------------------------------------------
// Coupling

CoupledPair couple(const DifferentialForm &omega, const DifferentialForm &omega_prime)
{
	const BoxLattice &B = omega.box(), &Bp = omega_prime.box();
	if (omega.degree() != 2 || omega_prime.degree() != 2)
		throw PreconditionError("couple needs plaquette configurations");
	if (B == Bp)
		throw PreconditionError("couple needs a proper sub-box");
	CellSet outside = outside_plaquettes(B, Bp);
	VortexGraph g(omega, omega_prime);

	std::vector<std::uint8_t> reaches(g.component_count(), 0);
	for (const Cell &c : g.vertices())
		if (outside.contains(c))
			reaches[g.component(c)] = 1;

	CoupledPair out{omega, omega_prime, DifferentialForm(Bp, omega.group(), 2), CellSet(Bp, 2)};
	for (std::size_t i = 0; i < Bp.count(2); ++i)
	{
		Cell c = Bp.cell(2, i);
		int label = g.component(c);
		if (label >= 0 && reaches[label])
		{
			out.hat.set_flags(i, 3);
			out.glued.codes()[i] = omega_prime.codes()[i];
		}
		else
			out.glued.codes()[i] = omega.codes()[B.index(c)];
	}
	return out;
}

CoupledPair coupled_sample(ConfigurationSampler &outer, ConfigurationSampler &inner)
{
	DifferentialForm w = outer.draw();
	DifferentialForm wp = inner.draw();
	return couple(w, wp);
}

// ---------------------------------------------------------------------------
// Pair estimators

ProbabilityEstimate connection_probability(const ExactDistribution &dist, const CellSet &P1, const CellSet &P2,
										   std::size_t pairs, std::uint64_t seed)
{
	if (pairs == 0)
		throw PreconditionError("connection_probability needs at least one pair");
	TableSampler s0(dist, seed, 0), s1(dist, seed, 1);
	double hits = 0;
	for (std::size_t i = 0; i < pairs; ++i)
	{
		VortexGraph g(s0.draw(), s1.draw());
		hits += connected(g, P1, P2) ? 1 : 0;
	}
	double n = static_cast<double>(pairs);
	ProbabilityEstimate out;
	out.pairs = pairs;
	out.value = hits / n;
	out.standard_error = welford_se(hits, hits, n);
	return out;
}

DisconnectedEstimate disconnected_expectations(const ExactDistribution &dist, const LocalFunction &f,
											   const LocalFunction &g, std::size_t pairs, std::uint64_t seed)
{
	if (pairs == 0)
		throw PreconditionError("disconnected_expectations needs at least one pair");
	if (!disjoint(f.plaquettes(), g.plaquettes()))
		throw PreconditionError("disconnected_expectations needs disjoint supports");
	CellSet P1 = f.support(), P2 = g.support();
	TableSampler s0(dist, seed, 0), s1(dist, seed, 1);
	Complex sum_same = 0, sum_cross = 0;
	double sq_same = 0, sq_cross = 0;
	for (std::size_t i = 0; i < pairs; ++i)
	{
		DifferentialForm w0 = s0.draw(), w1 = s1.draw();
		VortexGraph graph(w0, w1);
		if (connected(graph, P1, P2))
			continue;
		Complex a = f(w0) * g(w0), b = f(w0) * g(w1);
		sum_same += a;
		sum_cross += b;
		sq_same += std::norm(a);
		sq_cross += std::norm(b);
	}
	double n = static_cast<double>(pairs);
	DisconnectedEstimate out;
	out.pairs = pairs;
	out.same = sum_same / n;
	out.cross = sum_cross / n;
	// complex variance: E|X|^2 - |EX|^2
	out.se_same = n > 1 ? std::sqrt(std::max(0.0, sq_same / n - std::norm(out.same)) / (n - 1)) : 0;
	out.se_cross = n > 1 ? std::sqrt(std::max(0.0, sq_cross / n - std::norm(out.cross)) / (n - 1)) : 0;
	return out;
}

// ---------------------------------------------------------------------------
// Vortex probabilities

std::vector<std::vector<std::size_t>> irreducible_restrictions(const DifferentialForm &omega, const CellSet &P,
															   double budget)
{
	if (!P.symmetric() || P.empty())
		throw PreconditionError("P must be non-empty and symmetric");
	std::vector<std::size_t> seed = P.positive_indices();
	for (std::size_t i : seed)
		if (omega.codes()[i] == 0)
			return {};
	ClosureSearch search(omega.box(), omega.group());
	search.set_values(omega.codes());
	search.set_budget(budget);
	std::vector<std::vector<std::size_t>> found;
	search.run(seed, omega.positive_support_size(),
			   [&](std::span<const std::size_t> s, std::span<const std::uint32_t>) { found.emplace_back(s.begin(), s.end()); });

	// every closed restriction containing P contains a minimal one that the
	// search also reports, so inclusion-minimal reports are the irreducible ones
	std::sort(found.begin(), found.end(), [](const auto &a, const auto &b) {
		return a.size() != b.size() ? a.size() < b.size() : a < b;
	});
	found.erase(std::unique(found.begin(), found.end()), found.end());
	std::vector<std::vector<std::size_t>> minimal;
	for (const auto &s : found)
	{
		bool has_sub = false;
		for (const auto &m : minimal)
			if (m.size() < s.size() && std::includes(s.begin(), s.end(), m.begin(), m.end()))
			{
				has_sub = true;
				break;
			}
		if (!has_sub)
			minimal.push_back(s);
	}
	return minimal;
}

bool in_pi_geq(const DifferentialForm &omega, const CellSet &P, std::size_t M, double budget)
{
	for (const auto &s : irreducible_restrictions(omega, P, budget))
		if (s.size() >= M)
			return true;
	return false;
}

double pi_geq_mass(const ExactDistribution &dist, const CellSet &P, std::size_t M)
{
	if (!dist.materialized())
		throw ResourceError("Pi mass needs a materialized table", dist.states());
	double m = 0;
	for (std::size_t i = 0; i < dist.size(); ++i)
	{
		double p = dist.prob(i);
		if (p > 0 && in_pi_geq(dist.configuration(i), P, M))
			m += p;
	}
	return m;
}

BoundReport proposition31_report(const ExactDistribution &dist, const CellSet &P, std::size_t M)
{
	double a = alpha(dist.group(), dist.beta());
	if (5.0 * a >= 1.0)
		throw PreconditionError("proposition needs 5 alpha < 1");
	std::size_t k = P.positive_indices().size();
	if (M < k)
		throw PreconditionError("M must be at least |P+|");
	double lhs = pi_geq_mass(dist, P, M);
	double rhs = std::pow(5.0, static_cast<double>(M - k)) * std::pow(a, static_cast<double>(M)) / (1.0 - 5.0 * a);
	nlohmann::json in{{"group", dist.group().to_string()},
					  {"box", dist.box().to_string()},
					  {"beta", dist.beta()},
					  {"alpha", a},
					  {"M", M},
					  {"P_positive", k}};
	return make_report("3.1", lhs, rhs, true, std::move(in));
}

BoundReport proposition32_report(const ExactDistribution &outer, const ExactDistribution &inner, const CellSet &P0,
								 std::size_t M)
{
	const BoxLattice &B = outer.box(), &Bp = inner.box();
	if (!B.contains(Bp))
		throw PreconditionError("inner box not inside the outer box");
	if (!(P0.box() == Bp))
		throw PreconditionError("P0 must live on the inner box");
	double a = alpha(outer.group(), outer.beta());
	if (5.0 * a >= 1.0)
		throw PreconditionError("proposition needs 5 alpha < 1");
	auto pos = P0.positive_indices();
	if (pos.size() != 1 || !P0.symmetric())
		throw PreconditionError("pair proposition is implemented for P0 = {p, -p}");
	const std::size_t k = 1;
	if (M < k)
		throw PreconditionError("M must be at least |P0+|");

	// With P0 = {p, -p} a decomposition puts all of P0 on one side, and the
	// other side must then be empty-irreducible, i.e. zero. So the pair lies
	// in the set iff omega or omega' lies in the one-box set.
	Cell p = Bp.cell(2, pos[0]);
	double m_outer = pi_geq_mass(outer, oriented(B, p), M);
	double m_inner = pi_geq_mass(inner, P0, M);
	double lhs = 1.0 - (1.0 - m_outer) * (1.0 - m_inner);

	double base = std::pow(2.0, static_cast<double>(k)) * std::pow(5.0, static_cast<double>(M - k)) *
				  std::pow(a, static_cast<double>(M)) / ((1.0 - 5.0 * a) * (1.0 - 5.0 * a));
	double rhs = base * static_cast<double>(M - k + 1);
	nlohmann::json in{{"group", outer.group().to_string()},
					  {"box", B.to_string()},
					  {"inner_box", Bp.to_string()},
					  {"beta", outer.beta()},
					  {"alpha", a},
					  {"M", M},
					  {"P0_positive", k},
					  {"mass_outer", m_outer},
					  {"mass_inner", m_inner},
					  {"rhs_printed_factor", base * static_cast<double>(M - k)}};
	return make_report("3.2", lhs, rhs, true, std::move(in));
}

std::vector<BoundReport> proposition33_reports(const ExactDistribution &dist, const DifferentialForm &nu)
{
	double beta = dist.beta();
	double a = alpha(dist.group(), beta);
	if (!(beta > 0) || 5.0 * a >= 1.0)
		throw PreconditionError("proposition needs beta > 0 and 5 alpha < 1");
	if (!is_closed(nu) || nu.is_zero())
		throw PreconditionError("proposition needs a non-zero closed nu");
	auto masses = agreement_masses(dist, std::span(&nu, 1));
	double mu = masses[0].equal;
	double phi = activity(nu, beta);
	double size = static_cast<double>(nu.support().size());
	double lower = (1.0 - std::pow(5.0, 5) * std::pow(a, 6) * size / (2.0 * (1.0 - 5.0 * a))) * phi;
	int d = distance_to_boundary(dist.box(), nu.support());
	nlohmann::json in{{"group", dist.group().to_string()},
					  {"box", dist.box().to_string()},
					  {"beta", beta},
					  {"alpha", a},
					  {"support", size},
					  {"dist_star_boundary", d},
					  {"activity", phi},
					  {"lower", lower}};
	return {make_report("3.3-upper", mu, phi, true, in), make_report("3.3-lower", lower, mu, d >= 7, in)};
}

} // namespace lgt

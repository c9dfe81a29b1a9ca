#include "lgt/gibbs_measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace lgt {

double wilson_action(const DifferentialForm &sigma)
{
	if (sigma.degree() != 1)
		throw PreconditionError("wilson_action expects a 1-form");
	auto omega = exterior_derivative(sigma);
	const GroupSpec &G = sigma.group();
	double s = 0;
	// both orientations: Re tr rho is even, so each positive plaquette counts twice
	for (std::uint32_t c : omega.codes())
		s += 2 * G.re_tr_code(c);
	return -s;
}

double activity(const DifferentialForm &omega, double beta)
{
	const GroupSpec &G = omega.group();
	double log_w = 0;
	for (std::uint32_t c : omega.codes())
		if (c)
		{
			double x = std::min(0.0, G.re_tr_code(c) - G.dim());
			log_w += 2 * beta * x;
		}
	if (!(beta >= 0))
		throw DomainError("beta must be >= 0");
	return std::exp(log_w);
}

// ---------------------------------------------------------------------------

WeightClasses::WeightClasses(const GroupSpec &G, std::size_t plaquettes) : radix_(plaquettes + 1)
{
	step_.assign(G.order(), 0);
	std::vector<int> cls(G.order(), -1);
	for (std::uint32_t c = 1; c < G.order(); ++c)
	{
		double x = G.re_tr_code(c) - G.dim();
		int found = -1;
		for (std::size_t k = 0; k < level_.size(); ++k)
			if (std::abs(level_[k] - x) < 1e-12)
				found = static_cast<int>(k);
		if (found < 0)
		{
			found = static_cast<int>(level_.size());
			level_.push_back(x);
		}
		cls[c] = found;
	}
	std::vector<std::size_t> stride(level_.size());
	bins_ = 1;
	for (std::size_t k = 0; k < level_.size(); ++k)
	{
		stride[k] = bins_;
		bins_ *= radix_;
	}
	for (std::uint32_t c = 1; c < G.order(); ++c)
		step_[c] = stride[cls[c]];
}

std::vector<int> WeightClasses::counts(std::size_t signature) const
{
	std::vector<int> n(level_.size());
	for (std::size_t k = 0; k < level_.size(); ++k)
	{
		n[k] = static_cast<int>(signature % radix_);
		signature /= radix_;
	}
	return n;
}

std::vector<double> WeightClasses::weights(double beta) const
{
	std::vector<double> w(bins_);
	for (std::size_t s = 0; s < bins_; ++s)
	{
		auto n = counts(s);
		double e = 0;
		for (std::size_t k = 0; k < level_.size(); ++k)
			e += n[k] * 2 * beta * std::min(0.0, level_[k]);
		w[s] = std::exp(e);
	}
	return w;
}

// ---------------------------------------------------------------------------

GaugeFixedWalk::GaugeFixedWalk(BoxLattice box, GroupSpec group)
	: box_(std::move(box)), group_(std::move(group)), classes_(group_, box_.count(2))
{
	auto tree = spanning_tree_edges(box_);
	for (std::size_t e = 0; e < tree.size(); ++e)
		if (!tree[e])
			free_edges_.push_back(e);
	for (std::size_t e : free_edges_)
		for (int j = 0; j < group_.dim(); ++j)
		{
			Digit d;
			d.radix = group_.factors()[j];
			std::uint32_t u = group_.unit(j).code;
			for (const Incidence &in : box_.cofaces(1, e))
			{
				std::uint32_t up = in.sign > 0 ? u : group_.neg_code(u);
				d.touches.push_back({in.index, up, group_.neg_code(up)});
			}
			digits_.push_back(std::move(d));
		}
}

double GaugeFixedWalk::states() const
{
	return std::pow(static_cast<double>(group_.order()), static_cast<double>(free_edges_.size()));
}

// ---------------------------------------------------------------------------

PlaquetteCodec::PlaquetteCodec(const GroupSpec &G, std::size_t plaquettes)
	: bits_(std::max(1, static_cast<int>(std::bit_width(G.order() - 1)))), count_(plaquettes)
{}

std::uint64_t PlaquetteCodec::pack(const std::uint32_t *codes) const
{
	std::uint64_t k = 0;
	for (std::size_t i = count_; i-- > 0;)
		k = (k << bits_) | codes[i];
	return k;
}

void PlaquetteCodec::unpack(std::uint64_t key, std::uint32_t *codes) const
{
	std::uint64_t mask = (std::uint64_t{1} << bits_) - 1;
	for (std::size_t i = 0; i < count_; ++i)
	{
		codes[i] = static_cast<std::uint32_t>(key & mask);
		key >>= bits_;
	}
}

std::string encode_hex(const GroupSpec &G, std::span<const std::uint32_t> codes)
{
	static const char *digits = "0123456789abcdef";
	std::string s;
	bool wide = G.order() > 256;
	for (std::uint32_t c : codes)
	{
		if (wide)
		{
			s += digits[c >> 12 & 15];
			s += digits[c >> 8 & 15];
		}
		s += digits[c >> 4 & 15];
		s += digits[c & 15];
	}
	return s;
}

// ---------------------------------------------------------------------------

namespace {

struct TableBuilder
{
	const PlaquetteCodec &codec;
	std::vector<std::uint64_t> &hist;
	std::vector<std::uint64_t> *keys;
	std::vector<std::uint32_t> *sig;

	void change(std::uint32_t, std::uint32_t, std::uint32_t) {}
	void visit(const std::uint32_t *omega, std::size_t s)
	{
		++hist[s];
		if (keys)
		{
			keys->push_back(codec.pack(omega));
			sig->push_back(static_cast<std::uint32_t>(s));
		}
	}
};

} // namespace

ExactDistribution::ExactDistribution(BoxLattice box, GroupSpec group, double beta, double budget,
									 double materialize_limit)
	: walk_(std::move(box), std::move(group)), beta_(beta), codec_(walk_.group(), walk_.box().count(2))
{
	if (!(beta >= 0))
		throw DomainError("beta must be >= 0");
	double n = walk_.states();
	if (n > budget)
		throw ResourceError("exact enumeration needs " + std::to_string(n) + " states, budget is " +
								std::to_string(budget),
							n);
	hist_.assign(walk_.classes().bins(), 0);
	bool table = n <= materialize_limit && codec_.packable();
	if (table)
	{
		std::vector<std::uint64_t> keys;
		std::vector<std::uint32_t> sig;
		keys.reserve(static_cast<std::size_t>(n));
		sig.reserve(static_cast<std::size_t>(n));
		walk_.run(TableBuilder{codec_, hist_, &keys, &sig});
		std::vector<std::uint32_t> order(keys.size());
		std::iota(order.begin(), order.end(), 0u);
		std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
		keys_.resize(keys.size());
		sig_.resize(keys.size());
		for (std::size_t i = 0; i < order.size(); ++i)
		{
			keys_[i] = keys[order[i]];
			sig_[i] = sig[order[i]];
		}
	}
	else
		walk_.run(TableBuilder{codec_, hist_, nullptr, nullptr});

	set_beta(beta_);
}

void ExactDistribution::set_beta(double beta)
{
	if (!(beta >= 0))
		throw DomainError("beta must be >= 0");
	beta_ = beta;
	weights_ = walk_.classes().weights(beta_);
	long double z = 0;
	for (std::size_t s = 0; s < hist_.size(); ++s)
		z += static_cast<long double>(hist_[s]) * weights_[s];
	z_ = static_cast<double>(z);

	cumulative_.assign(keys_.size(), 0.0);
	long double acc = 0;
	for (std::size_t i = 0; i < keys_.size(); ++i)
	{
		acc += weights_[sig_[i]];
		cumulative_[i] = static_cast<double>(acc / z);
	}
}

ExactDistribution ExactDistribution::reweighted(double beta) const
{
	ExactDistribution d(*this);
	d.set_beta(beta);
	return d;
}

double ExactDistribution::mass(std::span<const std::uint64_t> hist) const
{
	long double m = 0;
	for (std::size_t s = 0; s < hist.size(); ++s)
		m += static_cast<long double>(hist[s]) * weights_[s];
	return static_cast<double>(m / z_);
}

double ExactDistribution::probability(const DifferentialForm &omega) const
{
	if (!(omega.box() == box()) || !(omega.group() == group()) || omega.degree() != 2)
		throw PreconditionError("configuration does not belong to this distribution");
	if (!is_closed(omega))
		return 0;
	return activity(omega, beta_) / z_;
}

void ExactDistribution::require_table() const
{
	if (!materialized())
		throw ResourceError("distribution table was not materialized", states());
}

void ExactDistribution::decode(std::size_t i, std::vector<std::uint32_t> &codes) const
{
	require_table();
	codes.resize(box().count(2));
	codec_.unpack(keys_.at(i), codes.data());
}

DifferentialForm ExactDistribution::configuration(std::size_t i) const
{
	DifferentialForm w(box(), group(), 2);
	decode(i, w.codes());
	return w;
}

std::size_t ExactDistribution::find(std::span<const std::uint32_t> codes) const
{
	require_table();
	if (codes.size() != box().count(2))
		throw PreconditionError("configuration length does not match the box");
	std::uint64_t k = codec_.pack(codes.data());
	auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
	if (it == keys_.end() || *it != k)
		return keys_.size();
	return static_cast<std::size_t>(it - keys_.begin());
}

std::size_t ExactDistribution::sample_index(CounterRng &rng) const
{
	require_table();
	double u = rng.uniform();
	auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
	if (it == cumulative_.end())
		--it;
	return static_cast<std::size_t>(it - cumulative_.begin());
}

ExactDistribution exact_distribution(const BoxLattice &box, const GroupSpec &group, double beta, double budget)
{
	return ExactDistribution(box, group, beta, budget);
}

// ---------------------------------------------------------------------------
// Streaming accumulation: each tracker has a status that only changes when
// one of its plaquettes changes. States are binned by signature in a running
// histogram; when a status changes, the states seen since the previous change
// are credited to the old status as a histogram difference. Everything stays
// in integers until the final weighting.

namespace {

struct LazyHistograms
{
	std::size_t bins;
	std::vector<std::uint64_t> running;

	explicit LazyHistograms(std::size_t b) : bins(b), running(b, 0) {}

	void credit(std::vector<std::uint64_t> &snapshot, std::vector<std::uint64_t> &into)
	{
		for (std::size_t s = 0; s < bins; ++s)
		{
			into[s] += running[s] - snapshot[s];
			snapshot[s] = running[s];
		}
	}
};

struct AgreementVisitor
{
	struct Tracker
	{
		std::vector<std::uint32_t> target; // per plaquette of the support
		int size;
		int equal = 0;
		int zero;
		std::vector<std::uint64_t> snapshot, hist_equal, hist_zero;
		int status() const { return equal == size ? 1 : (zero == size ? 2 : 0); }
	};

	LazyHistograms lazy;
	std::vector<Tracker> trackers;
	// per plaquette: (tracker, slot)
	std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> watch;

	void settle(Tracker &t, int old_status)
	{
		if (old_status == 1)
			lazy.credit(t.snapshot, t.hist_equal);
		else if (old_status == 2)
			lazy.credit(t.snapshot, t.hist_zero);
		else
			t.snapshot = lazy.running;
	}

	void change(std::uint32_t p, std::uint32_t from, std::uint32_t to)
	{
		for (auto [ti, slot] : watch[p])
		{
			Tracker &t = trackers[ti];
			int before = t.status();
			std::uint32_t want = t.target[slot];
			t.equal += (to == want) - (from == want);
			t.zero += (to == 0) - (from == 0);
			if (t.status() != before)
				settle(t, before);
		}
	}
	void visit(const std::uint32_t *, std::size_t s) { ++lazy.running[s]; }
	void finish()
	{
		for (auto &t : trackers)
			settle(t, t.status());
	}
};

} // namespace

std::vector<AgreementMass> agreement_masses(const ExactDistribution &dist, std::span<const DifferentialForm> nus,
											bool force_walk)
{
	for (const auto &nu : nus)
		if (!(nu.box() == dist.box()) || !(nu.group() == dist.group()) || nu.degree() != 2)
			throw PreconditionError("nu must be a 2-form on the distribution's box and group");

	std::vector<AgreementMass> out(nus.size(), {0, 0});
	if (dist.materialized() && !force_walk)
	{
		std::vector<std::vector<std::size_t>> supp;
		for (const auto &nu : nus)
			supp.push_back(nu.positive_support());
		std::vector<std::uint32_t> w;
		for (std::size_t i = 0; i < dist.size(); ++i)
		{
			dist.decode(i, w);
			double pr = dist.prob(i);
			for (std::size_t k = 0; k < nus.size(); ++k)
			{
				bool eq = true, zero = true;
				for (std::size_t p : supp[k])
				{
					eq = eq && w[p] == nus[k].codes()[p];
					zero = zero && w[p] == 0;
				}
				if (eq)
					out[k].equal += pr;
				else if (zero)
					out[k].zero += pr;
			}
		}
		// nu = 0: both events are the sure event
		for (std::size_t k = 0; k < nus.size(); ++k)
			if (supp[k].empty())
				out[k] = {1.0, 1.0};
		return out;
	}

	auto h = agreement_histograms(dist.walk(), nus);
	for (std::size_t k = 0; k < nus.size(); ++k)
	{
		if (nus[k].is_zero())
			out[k] = {1.0, 1.0};
		else
			out[k] = {dist.mass(h[k].equal), dist.mass(h[k].zero)};
	}
	return out;
}

std::vector<AgreementHistograms> agreement_histograms(const GaugeFixedWalk &walk, std::span<const DifferentialForm> nus)
{
	const std::size_t P = walk.box().count(2);
	const std::size_t bins = walk.classes().bins();
	AgreementVisitor v{LazyHistograms(bins), {}, {}};
	v.watch.resize(P);
	for (std::size_t k = 0; k < nus.size(); ++k)
	{
		if (!(nus[k].box() == walk.box()) || !(nus[k].group() == walk.group()) || nus[k].degree() != 2)
			throw PreconditionError("nu must be a 2-form on the walk's box and group");
		AgreementVisitor::Tracker t;
		auto supp = nus[k].positive_support();
		t.size = static_cast<int>(supp.size());
		t.zero = t.size; // the walk starts at omega = 0
		t.equal = 0;
		for (std::size_t slot = 0; slot < supp.size(); ++slot)
		{
			t.target.push_back(nus[k].codes()[supp[slot]]);
			v.watch[supp[slot]].push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(slot)});
		}
		t.snapshot.assign(bins, 0);
		t.hist_equal.assign(bins, 0);
		t.hist_zero.assign(bins, 0);
		v.trackers.push_back(std::move(t));
	}
	walk.run(v);
	v.finish();
	std::vector<AgreementHistograms> out;
	for (auto &t : v.trackers)
		out.push_back({std::move(t.hist_equal), std::move(t.hist_zero)});
	return out;
}

double prob_ratio(const ExactDistribution &dist, const DifferentialForm &nu)
{
	if (auto w = closedness_witness(nu))
		throw NotClosedError("nu is not closed: Bianchi fails on " + to_string(*w, nu.box().dim()), *w);
	std::vector<DifferentialForm> one{nu};
	auto m = agreement_masses(dist, one);
	if (!(m[0].zero > 0))
		throw PreconditionError("the event omega|supp nu = 0 has probability zero");
	return m[0].equal / m[0].zero;
}

namespace {

struct MarginalVisitor
{
	LazyHistograms lazy;
	std::vector<int> slot_of; // per plaquette, -1 if not watched
	int bits;
	std::uint64_t key = 0;
	std::vector<std::uint64_t> snapshot;
	std::map<std::uint64_t, std::vector<std::uint64_t>> hist;

	void settle()
	{
		auto &h = hist[key];
		if (h.empty())
			h.assign(lazy.bins, 0);
		lazy.credit(snapshot, h);
	}
	void change(std::uint32_t p, std::uint32_t from, std::uint32_t to)
	{
		int slot = slot_of[p];
		if (slot < 0)
			return;
		settle();
		key ^= static_cast<std::uint64_t>(from ^ to) << (slot * bits);
	}
	void visit(const std::uint32_t *, std::size_t s) { ++lazy.running[s]; }
};

} // namespace

std::map<std::uint64_t, double> restricted_marginal(const ExactDistribution &dist,
													std::span<const std::size_t> plaquettes, bool force_walk)
{
	const std::size_t P = dist.box().count(2);
	PlaquetteCodec small(dist.group(), plaquettes.size());
	if (!small.packable())
		throw ResourceError("restricted configuration does not fit a 64-bit key",
							static_cast<double>(plaquettes.size()));
	for (std::size_t p : plaquettes)
		if (p >= P)
			throw PreconditionError("plaquette index outside the box");

	std::map<std::uint64_t, double> out;
	if (dist.materialized() && !force_walk)
	{
		std::vector<std::uint32_t> w, r(plaquettes.size());
		for (std::size_t i = 0; i < dist.size(); ++i)
		{
			dist.decode(i, w);
			for (std::size_t k = 0; k < plaquettes.size(); ++k)
				r[k] = w[plaquettes[k]];
			out[small.pack(r.data())] += dist.prob(i);
		}
		return out;
	}

	MarginalVisitor v{LazyHistograms(dist.walk().classes().bins()), std::vector<int>(P, -1), small.bits(), 0, {}, {}};
	for (std::size_t k = 0; k < plaquettes.size(); ++k)
		v.slot_of[plaquettes[k]] = static_cast<int>(k);
	v.snapshot.assign(v.lazy.bins, 0);
	dist.walk().run(v);
	v.settle();
	for (auto &[k, h] : v.hist)
	{
		double m = dist.mass(h);
		if (m > 0 || out.count(k))
			out[k] += m;
	}
	return out;
}

DifferentialForm sample_exact(const ExactDistribution &dist, CounterRng &rng)
{
	return dist.configuration(dist.sample_index(rng));
}

// ---------------------------------------------------------------------------

std::vector<double> edge_shift_conditional(const BoxLattice &box, const GroupSpec &G, double beta,
										   std::span<const std::uint32_t> omega, std::size_t edge)
{
	std::vector<double> logw(G.order(), 0.0);
	for (std::uint32_t h = 0; h < G.order(); ++h)
		for (const Incidence &in : box.cofaces(1, edge))
		{
			std::uint32_t d = in.sign > 0 ? h : G.neg_code(h);
			std::uint32_t v = G.add_code(omega[in.index], d);
			logw[h] += 2 * beta * std::min(0.0, G.re_tr_code(v) - G.dim());
		}
	double mx = *std::max_element(logw.begin(), logw.end());
	double z = 0;
	for (auto &x : logw)
	{
		x = std::exp(x - mx);
		z += x;
	}
	for (auto &x : logw)
		x /= z;
	return logw;
}

ChainState::ChainState(BoxLattice box, GroupSpec group, double beta, std::uint64_t seed, SamplerKind kind)
	: sigma_(box, group, 1), omega_(box, group, 2), beta_(beta), kind_(kind), rng_(seed)
{
	if (!(beta >= 0))
		throw DomainError("beta must be >= 0");
	level_.resize(group.order());
	for (std::uint32_t c = 0; c < group.order(); ++c)
		level_[c] = 2 * beta * std::min(0.0, group.re_tr_code(c) - group.dim());
	scratch_.resize(group.order());
}

void ChainState::shift(std::size_t edge, std::uint32_t h)
{
	if (!h)
		return;
	const GroupSpec &G = group();
	auto &s = sigma_.codes();
	auto &w = omega_.codes();
	s[edge] = G.add_code(s[edge], h);
	std::uint32_t nh = G.neg_code(h);
	for (const Incidence &in : box().cofaces(1, edge))
		w[in.index] = G.add_code(w[in.index], in.sign > 0 ? h : nh);
}

double ChainState::log_weight_shift(std::size_t edge, std::uint32_t h) const
{
	const GroupSpec &G = group();
	const auto &w = omega_.codes();
	std::uint32_t nh = G.neg_code(h);
	double lw = 0;
	for (const Incidence &in : box().cofaces(1, edge))
		lw += level_[G.add_code(w[in.index], in.sign > 0 ? h : nh)];
	return lw;
}

void ChainState::sweep()
{
	if (kind_ == SamplerKind::heat_bath)
		heat_bath_sweep(*this);
	else
		metropolis_sweep(*this);
}

void heat_bath_sweep(ChainState &s)
{
	const std::size_t E = s.box().count(1);
	const std::uint32_t n = s.group().order();
	for (std::size_t e = 0; e < E; ++e)
	{
		double mx = -1e300;
		for (std::uint32_t h = 0; h < n; ++h)
		{
			s.scratch_[h] = s.log_weight_shift(e, h);
			mx = std::max(mx, s.scratch_[h]);
		}
		double z = 0;
		for (std::uint32_t h = 0; h < n; ++h)
		{
			s.scratch_[h] = std::exp(s.scratch_[h] - mx);
			z += s.scratch_[h];
		}
		double u = s.rng_.uniform() * z;
		std::uint32_t pick = n - 1;
		for (std::uint32_t h = 0; h < n; ++h)
		{
			u -= s.scratch_[h];
			if (u < 0)
			{
				pick = h;
				break;
			}
		}
		s.shift(e, pick);
	}
	++s.sweeps_;
}

void metropolis_sweep(ChainState &s)
{
	const std::size_t E = s.box().count(1);
	const std::uint32_t n = s.group().order();
	for (std::size_t e = 0; e < E; ++e)
	{
		std::uint32_t h = static_cast<std::uint32_t>(1 + s.rng_.below(n - 1));
		double dl = s.log_weight_shift(e, h) - s.log_weight_shift(e, 0);
		double u = s.rng_.uniform();
		if (dl >= 0 || u < std::exp(dl))
			s.shift(e, h);
	}
	++s.sweeps_;
}

TableSampler::TableSampler(const ExactDistribution &dist, std::uint64_t seed, std::uint64_t stream)
	: dist_(dist), rng_(seed, stream)
{}

DifferentialForm TableSampler::draw() { return sample_exact(dist_, rng_); }

ChainSampler::ChainSampler(ChainState chain, int burnin, int thin) : chain_(std::move(chain)), thin_(thin)
{
	if (burnin < 0 || thin < 1)
		throw PreconditionError("burn-in must be >= 0 and thinning >= 1");
	for (int i = 0; i < burnin; ++i)
		chain_.sweep();
}

DifferentialForm ChainSampler::draw()
{
	for (int i = 0; i < thin_; ++i)
		chain_.sweep();
	return chain_.omega();
}

} // namespace lgt

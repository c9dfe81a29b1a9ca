#pragma once

#include "lgt/abelian_group.hpp"
#include "lgt/cell_complex.hpp"
#include "lgt/rng.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lgt {

// S(sigma) = -sum over oriented plaquettes p of Re tr rho((d sigma)_p).
double wilson_action(const DifferentialForm &sigma);

// Product over the oriented support of phi_beta(omega_p), i.e. every
// positive plaquette contributes phi_beta(omega_p)^2.
double activity(const DifferentialForm &omega, double beta);

// Non-zero group elements grouped by Re tr rho. A plaquette configuration's
// weight depends only on how many plaquettes fall in each class; the vector
// of those counts is packed into one "signature" index.
class WeightClasses
{
  public:
	WeightClasses(const GroupSpec &G, std::size_t plaquettes);

	int count() const { return static_cast<int>(level_.size()); }
	std::size_t bins() const { return bins_; }
	// Signature increment of one plaquette holding this element (0 for 0).
	std::size_t step(std::uint32_t code) const { return step_[code]; }
	std::vector<int> counts(std::size_t signature) const;
	// Weight of every signature at this beta.
	std::vector<double> weights(double beta) const;

  private:
	std::vector<double> level_; // Re tr rho - dim, per class
	std::vector<std::size_t> step_;
	std::size_t radix_;
	std::size_t bins_;
};

// Enumerates Sigma_{P_B} once: sigma is gauge fixed to 0 on the BFS tree
// and the free edges run through a reflected mixed-radix Gray code, so each
// step moves one edge by one generator and touches only its plaquettes.
//
// Visitor: change(p, from, to) for every plaquette update of a step, then
// visit(omega, signature) for the new state. The zero state comes first.
class GaugeFixedWalk
{
  public:
	GaugeFixedWalk(BoxLattice box, GroupSpec group);

	const BoxLattice &box() const { return box_; }
	const GroupSpec &group() const { return group_; }
	const WeightClasses &classes() const { return classes_; }
	std::size_t free_edge_count() const { return free_edges_.size(); }
	const std::vector<std::size_t> &free_edges() const { return free_edges_; }
	// |G|^(free edges)
	double states() const;

	template <class Visitor> void run(Visitor &&v) const;

  private:
	struct Touch
	{
		std::uint32_t plaquette;
		std::uint32_t up;   // added when the digit increases
		std::uint32_t down; // added when it decreases
	};
	struct Digit
	{
		int radix;
		std::vector<Touch> touches;
	};

	BoxLattice box_;
	GroupSpec group_;
	WeightClasses classes_;
	std::vector<std::size_t> free_edges_;
	std::vector<Digit> digits_;
};

template <class Visitor> void GaugeFixedWalk::run(Visitor &&v) const
{
	const std::size_t P = box_.count(2);
	std::vector<std::uint32_t> omega(P, 0);
	std::size_t sig = 0;
	v.visit(static_cast<const std::uint32_t *>(omega.data()), sig);

	// Knuth's loopless reflected mixed-radix Gray code (TAOCP 7.2.1.1 H)
	const std::size_t n = digits_.size();
	std::vector<int> a(n, 0), o(n, 1);
	std::vector<std::size_t> f(n + 1);
	for (std::size_t j = 0; j <= n; ++j)
		f[j] = j;
	while (true)
	{
		std::size_t j = f[0];
		f[0] = 0;
		if (j == n)
			break;
		a[j] += o[j];
		const Digit &d = digits_[j];
		bool up = o[j] > 0;
		for (const Touch &t : d.touches)
		{
			std::uint32_t from = omega[t.plaquette];
			std::uint32_t to = group_.add_code(from, up ? t.up : t.down);
			sig += classes_.step(to);
			sig -= classes_.step(from);
			omega[t.plaquette] = to;
			v.change(t.plaquette, from, to);
		}
		if (a[j] == 0 || a[j] == d.radix - 1)
		{
			o[j] = -o[j];
			f[j] = f[j + 1];
			f[j + 1] = j + 1;
		}
		v.visit(static_cast<const std::uint32_t *>(omega.data()), sig);
	}
}

// Packs one code per positive plaquette into an integer key (plaquette 0 in
// the lowest bits) when it fits in 64 bits.
class PlaquetteCodec
{
  public:
	PlaquetteCodec(const GroupSpec &G, std::size_t plaquettes);
	bool packable() const { return bits_ * count_ <= 64; }
	std::uint64_t pack(const std::uint32_t *codes) const;
	void unpack(std::uint64_t key, std::uint32_t *codes) const;
	int bits() const { return bits_; }

  private:
	int bits_;
	std::size_t count_;
};

// One byte per positive plaquette (two, big-endian, for groups of order
// above 256), in canonical plaquette order, as lowercase hex.
std::string encode_hex(const GroupSpec &G, std::span<const std::uint32_t> codes);

// The Gibbs law of omega = d sigma on a box. Probabilities follow from a
// histogram of gauge-fixed states by signature; a sorted table of states is
// kept when it is small enough, otherwise consumers re-run the walk.
class ExactDistribution
{
  public:
	static constexpr double kDefaultBudget = 1073741824.0;	  // 2^30 states
	static constexpr double kDefaultMaterialize = 4194304.0; // 2^22 states

	ExactDistribution(BoxLattice box, GroupSpec group, double beta, double budget = kDefaultBudget,
					  double materialize_limit = kDefaultMaterialize);

	const BoxLattice &box() const { return walk_.box(); }
	const GroupSpec &group() const { return walk_.group(); }
	double beta() const { return beta_; }
	const GaugeFixedWalk &walk() const { return walk_; }
	double states() const { return walk_.states(); }
	// Sum of activities over Sigma_{P_B}.
	double partition() const { return z_; }
	const std::vector<std::uint64_t> &histogram() const { return hist_; }
	const std::vector<double> &signature_weights() const { return weights_; }
	// sum_s hist[s] weight(s) / Z
	double mass(std::span<const std::uint64_t> hist) const;

	// Same states at another beta; reuses the histogram and table.
	ExactDistribution reweighted(double beta) const;

	// activity / Z for closed omega, 0 otherwise.
	double probability(const DifferentialForm &omega) const;

	bool materialized() const { return !keys_.empty(); }
	std::size_t size() const { return keys_.size(); }
	std::uint64_t key(std::size_t i) const { return keys_[i]; }
	double prob(std::size_t i) const { return weights_[sig_[i]] / z_; }
	void decode(std::size_t i, std::vector<std::uint32_t> &codes) const;
	DifferentialForm configuration(std::size_t i) const;
	// Table index of a configuration, or size() if absent.
	std::size_t find(std::span<const std::uint32_t> codes) const;
	const PlaquetteCodec &codec() const { return codec_; }

	// Cumulative-index draw from the table.
	std::size_t sample_index(CounterRng &rng) const;

  private:
	GaugeFixedWalk walk_;
	double beta_ = 0;
	PlaquetteCodec codec_;
	std::vector<std::uint64_t> hist_;
	std::vector<double> weights_;
	double z_ = 0;
	std::vector<std::uint64_t> keys_;
	std::vector<std::uint32_t> sig_;
	std::vector<double> cumulative_;

	void set_beta(double beta);
	void require_table() const;
};

ExactDistribution exact_distribution(const BoxLattice &box, const GroupSpec &group, double beta,
									 double budget = ExactDistribution::kDefaultBudget);

// Masses of {omega restricted to supp nu equals nu} and {... equals 0}.
struct AgreementMass
{
	double equal;
	double zero;
};
// Signature histograms of the same two events; independent of beta.
struct AgreementHistograms
{
	std::vector<std::uint64_t> equal;
	std::vector<std::uint64_t> zero;
};
std::vector<AgreementHistograms> agreement_histograms(const GaugeFixedWalk &walk, std::span<const DifferentialForm> nus);

std::vector<AgreementMass> agreement_masses(const ExactDistribution &dist, std::span<const DifferentialForm> nus,
											bool force_walk = false);

// mu(omega|supp nu = nu) / mu(omega|supp nu = 0) for closed nu.
double prob_ratio(const ExactDistribution &dist, const DifferentialForm &nu);

// Law of omega restricted to the given positive plaquettes of dist.box(),
// keyed by the packed restricted codes (first plaquette in the lowest bits).
std::map<std::uint64_t, double> restricted_marginal(const ExactDistribution &dist,
													std::span<const std::size_t> plaquettes, bool force_walk = false);

DifferentialForm sample_exact(const ExactDistribution &dist, CounterRng &rng);

// ---------------------------------------------------------------------------
// Markov chains

enum class SamplerKind
{
	heat_bath,
	metropolis
};

// Conditional law of the shift h added to sigma_e given every other edge,
// written through omega: proportional to prod over plaquettes p containing e
// of phi_beta(omega_p + s_p h)^2.
std::vector<double> edge_shift_conditional(const BoxLattice &box, const GroupSpec &G, double beta,
										   std::span<const std::uint32_t> omega, std::size_t edge);

class ChainState
{
  public:
	ChainState(BoxLattice box, GroupSpec group, double beta, std::uint64_t seed,
			   SamplerKind kind = SamplerKind::heat_bath);

	const BoxLattice &box() const { return sigma_.box(); }
	const GroupSpec &group() const { return sigma_.group(); }
	double beta() const { return beta_; }
	SamplerKind kind() const { return kind_; }
	const DifferentialForm &sigma() const { return sigma_; }
	// d sigma, kept in step with sigma
	const DifferentialForm &omega() const { return omega_; }
	std::uint64_t sweeps() const { return sweeps_; }
	CounterRng &rng() { return rng_; }

	// One pass over every positive edge in canonical order.
	void sweep();

  private:
	DifferentialForm sigma_;
	DifferentialForm omega_;
	double beta_;
	SamplerKind kind_;
	CounterRng rng_;
	std::uint64_t sweeps_ = 0;
	std::vector<double> level_; // 2 beta (Re tr rho - dim) per element
	std::vector<double> scratch_;

	void shift(std::size_t edge, std::uint32_t h);
	double log_weight_shift(std::size_t edge, std::uint32_t h) const;
	friend void heat_bath_sweep(ChainState &s);
	friend void metropolis_sweep(ChainState &s);
};

void heat_bath_sweep(ChainState &s);
void metropolis_sweep(ChainState &s);

// Source of plaquette configurations on a fixed box.
class ConfigurationSampler
{
  public:
	virtual ~ConfigurationSampler() = default;
	virtual const BoxLattice &box() const = 0;
	virtual DifferentialForm draw() = 0;
};

class TableSampler : public ConfigurationSampler
{
  public:
	TableSampler(const ExactDistribution &dist, std::uint64_t seed, std::uint64_t stream = 0);
	const BoxLattice &box() const override { return dist_.box(); }
	DifferentialForm draw() override;
	std::size_t draw_index() { return dist_.sample_index(rng_); }

  private:
	const ExactDistribution &dist_;
	CounterRng rng_;
};

class ChainSampler : public ConfigurationSampler
{
  public:
	ChainSampler(ChainState chain, int burnin = 1000, int thin = 10);
	const BoxLattice &box() const override { return chain_.box(); }
	DifferentialForm draw() override;
	const ChainState &chain() const { return chain_; }

  private:
	ChainState chain_;
	int thin_;
};

} // namespace lgt

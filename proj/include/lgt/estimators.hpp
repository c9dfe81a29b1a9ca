#pragma once

#include "lgt/abelian_group.hpp"
#include "lgt/cell_complex.hpp"
#include "lgt/gibbs_measure.hpp"
#include "lgt/vortex_graph.hpp"

#include "json.hpp"

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lgt {

using Complex = std::complex<double>;
// f : G -> C
using PlaquetteFunction = std::function<Complex(GroupElement)>;

// f(omega) depending on omega restricted to a symmetric plaquette set only.
// The rule sees the codes of the positive plaquettes in plaquettes() order.
class LocalFunction
{
  public:
	using Rule = std::function<Complex(std::span<const std::uint32_t>)>;

	LocalFunction(BoxLattice box, GroupSpec group, std::vector<std::size_t> plaquettes, Rule rule);

	// f(omega_p); p may carry either orientation.
	static LocalFunction at_plaquette(const BoxLattice &box, const GroupSpec &G, const Cell &p, PlaquetteFunction f);
	// tr rho(omega_p)
	static LocalFunction trace_at(const BoxLattice &box, const GroupSpec &G, const Cell &p);
	static LocalFunction constant(const BoxLattice &box, const GroupSpec &G, Complex value);

	const BoxLattice &box() const { return box_; }
	const GroupSpec &group() const { return group_; }
	const std::vector<std::size_t> &plaquettes() const { return plaquettes_; }
	CellSet support() const;
	// max over the |G|^|P+| restricted configurations
	double sup_norm() const { return sup_; }

	Complex restricted(std::span<const std::uint32_t> codes) const { return rule_(codes); }
	Complex operator()(const DifferentialForm &omega) const;
	Complex operator()(std::span<const std::uint32_t> omega_codes) const;

  private:
	BoxLattice box_;
	GroupSpec group_;
	std::vector<std::size_t> plaquettes_;
	Rule rule_;
	double sup_ = 0;
};

// satisfied iff lhs <= rhs + 1e-12
struct BoundReport
{
	std::string name;
	double lhs = 0;
	double rhs = 0;
	bool satisfied = false;
	bool preconditions_met = false;
	nlohmann::json inputs = nlohmann::json::object();

	nlohmann::json to_json() const;
};

BoundReport make_report(std::string name, double lhs, double rhs, bool preconditions_met,
						nlohmann::json inputs = nlohmann::json::object());

// ---------------------------------------------------------------------------
// Covariances

// E[f1 f2] - E[f1] E[f2], no conjugation. Supports must be disjoint.
Complex covariance_exact(const ExactDistribution &dist, const LocalFunction &f1, const LocalFunction &f2);

struct McmcEstimate
{
	Complex value;
	double standard_error = 0;
	std::size_t samples = 0;
	bool alpha_warning = false; // 30 alpha >= 1
};

// Batched means over `batches` consecutive blocks of the chain output.
McmcEstimate covariance_mcmc(ChainState chain, const LocalFunction &f1, const LocalFunction &f2,
							 std::size_t samples, int burnin = 1000, int thin = 10, std::size_t batches = 20);

// ---------------------------------------------------------------------------
// Spin expectation

// f(0) + 4 sum_g (f(g) - f(0)) phi_beta(g)^12
Complex spin_leading_order(const GroupSpec &G, const Cell &p, const PlaquetteFunction &f, double beta);
double max_deviation(const GroupSpec &G, const PlaquetteFunction &f); // max_g |f(g) - f(0)|
double sup_norm(const GroupSpec &G, const PlaquetteFunction &f);

// E[f(omega_p)] from the exact law.
Complex plaquette_expectation(const ExactDistribution &dist, const Cell &p, const PlaquetteFunction &f);

// dist*(P, boundary plaquettes of P_B); 1 when P meets them.
int distance_to_boundary(const BoxLattice &box, const CellSet &P);

// ---------------------------------------------------------------------------
// Theorem bounds, with dist* in place of dist_B / dist_{B,B'}

BoundReport theorem11_report(const ExactDistribution &dist, const LocalFunction &f1, const LocalFunction &f2);

BoundReport theorem12_report(const BoxLattice &box, const GroupSpec &G, double beta, const Cell &p,
							 const PlaquetteFunction &f, Complex expectation);
BoundReport theorem12_report(const ExactDistribution &dist, const Cell &p, const PlaquetteFunction &f);

BoundReport theorem13_report(const ExactDistribution &dist, const Cell &p1, const Cell &p2, const PlaquetteFunction &f1,
							 const PlaquetteFunction &f2);

// TV distance between the laws of omega|P under mu_B and mu_B'; P given as
// positive plaquette indices of the inner box.
double tv_restriction_exact(const ExactDistribution &outer, const ExactDistribution &inner,
							std::span<const std::size_t> inner_plaquettes);
double tv_restriction_exact(const BoxLattice &B, const BoxLattice &Bp, std::span<const std::size_t> inner_plaquettes,
							const GroupSpec &G, double beta, double budget = ExactDistribution::kDefaultBudget);

// P_B minus P_B' as a symmetric set of the outer box.
CellSet outside_plaquettes(const BoxLattice &B, const BoxLattice &Bp);

BoundReport theorem14_report(const ExactDistribution &outer, const ExactDistribution &inner,
							 std::span<const std::size_t> inner_plaquettes);

// ---------------------------------------------------------------------------
// Coupling of nested boxes

struct CoupledPair
{
	DifferentialForm omega;		  // on B
	DifferentialForm omega_prime; // on B'
	DifferentialForm glued;		  // on B': omega' on hat, omega elsewhere
	CellSet hat;				  // plaquettes of B' joined to P_B \ P_B'
};

CoupledPair couple(const DifferentialForm &omega, const DifferentialForm &omega_prime);
CoupledPair coupled_sample(ConfigurationSampler &outer, ConfigurationSampler &inner);

// ---------------------------------------------------------------------------
// Pair estimators with iid exact draws

struct ProbabilityEstimate
{
	double value = 0;
	double standard_error = 0;
	std::size_t pairs = 0;
};

// mu x mu of {P1 <-> P2 in G(omega, omega')}
ProbabilityEstimate connection_probability(const ExactDistribution &dist, const CellSet &P1, const CellSet &P2,
										   std::size_t pairs, std::uint64_t seed);

// Both sides of the disconnected-expectation identity:
// same = E[f(w0|P1) g(w0|P2) 1{P1 !<-> P2}], cross = E[f(w0|P1) g(w1|P2) 1{...}].
struct DisconnectedEstimate
{
	Complex same, cross;
	double se_same = 0, se_cross = 0;
	std::size_t pairs = 0;
};
DisconnectedEstimate disconnected_expectations(const ExactDistribution &dist, const LocalFunction &f,
											   const LocalFunction &g, std::size_t pairs, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Vortex probabilities

// Supports (positive indices) of the P-irreducible restrictions of omega
// whose support contains P.
std::vector<std::vector<std::size_t>> irreducible_restrictions(const DifferentialForm &omega, const CellSet &P,
															   double budget = 1e7);
// omega in Pi^>=_{P,M}
bool in_pi_geq(const DifferentialForm &omega, const CellSet &P, std::size_t M, double budget = 1e7);
double pi_geq_mass(const ExactDistribution &dist, const CellSet &P, std::size_t M);

BoundReport proposition31_report(const ExactDistribution &dist, const CellSet &P, std::size_t M);
// P0 given on the inner box, one plaquette up to sign.
BoundReport proposition32_report(const ExactDistribution &outer, const ExactDistribution &inner, const CellSet &P0,
								 std::size_t M);
// Two reports: mu(agree) <= phi(nu), and the lower bound <= mu(agree).
std::vector<BoundReport> proposition33_reports(const ExactDistribution &dist, const DifferentialForm &nu);

} // namespace lgt

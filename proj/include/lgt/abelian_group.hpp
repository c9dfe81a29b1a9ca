#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace lgt {

// Element of Z_{n1} x ... x Z_{nk}, stored as a mixed-radix code with the
// first factor most significant. Residues are available through GroupSpec.
struct GroupElement
{
	std::uint32_t code = 0;

	bool is_zero() const { return code == 0; }
	friend bool operator==(GroupElement, GroupElement) = default;
	friend auto operator<=>(GroupElement, GroupElement) = default;
};

class GroupSpec
{
  public:
	// Every factor must be >= 2; the group order is capped at 4096.
	explicit GroupSpec(std::vector<int> factors);

	// "Z2", "z3xZ2", ... (case-insensitive).
	static GroupSpec parse(std::string_view text);

	const std::vector<int> &factors() const { return factors_; }
	std::uint32_t order() const { return order_; }
	int dim() const { return static_cast<int>(factors_.size()); }
	std::string to_string() const;

	GroupElement zero() const { return {}; }
	GroupElement add(GroupElement a, GroupElement b) const;
	GroupElement neg(GroupElement a) const;
	GroupElement sub(GroupElement a, GroupElement b) const { return add(a, neg(b)); }

	std::vector<int> residues(GroupElement g) const;
	GroupElement element(const std::vector<int> &residues) const;
	GroupElement element(std::uint32_t code) const;

	// Generator of factor j (residue 1 in slot j).
	GroupElement unit(int j) const;

	// Every element in code order.
	std::vector<GroupElement> elements() const;

	// Hot-path versions without validation.
	std::uint32_t add_code(std::uint32_t a, std::uint32_t b) const
	{
		return tables_->add[a * order_ + b];
	}
	std::uint32_t neg_code(std::uint32_t a) const { return tables_->neg[a]; }
	double re_tr_code(std::uint32_t a) const { return tables_->re_tr[a]; }

	friend bool operator==(const GroupSpec &a, const GroupSpec &b)
	{
		return a.factors_ == b.factors_;
	}

  private:
	struct Tables
	{
		std::vector<std::uint32_t> add;
		std::vector<std::uint32_t> neg;
		std::vector<double> re_tr;
	};

	std::vector<int> factors_;
	std::vector<std::uint32_t> stride_;
	std::uint32_t order_ = 1;
	std::shared_ptr<const Tables> tables_;

	void check(GroupElement g) const;
};

// sum_j cos(2 pi g_j / n_j)
double re_tr_rho(const GroupSpec &G, GroupElement g);

// tr rho(g) = sum_j exp(2 pi i g_j / n_j)
std::complex<double> tr_rho(const GroupSpec &G, GroupElement g);

// exp(beta (Re tr rho(g) - Re tr rho(0)))
double phi_beta(const GroupSpec &G, GroupElement g, double beta);

// sum over g != 0 of phi_beta(g)^2
double alpha(const GroupSpec &G, double beta);

struct Constants
{
	double c1;
	double c2;
};

// c1 = 20 / (15^2 (1 - 5a)^2) * (1 + 2 / (1 - 30a)),  c2 = 30.
// As a -> 0 this tends to 4/15.
Constants constants(const GroupSpec &G, double beta);

struct CouplingParams
{
	double beta;
	double alpha;
	double c1; // NaN unless 30 alpha < 1
	double c2 = 30.0;

	CouplingParams(const GroupSpec &G, double beta);
	bool c1_defined() const { return 30.0 * alpha < 1.0; }
};

} // namespace lgt

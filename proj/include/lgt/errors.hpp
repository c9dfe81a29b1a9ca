#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lgt {

// Input outside the mathematical domain (bad residue, malformed group string).
class DomainError : public std::domain_error {
  public:
	using std::domain_error::domain_error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
  public:
	using std::invalid_argument::invalid_argument;
};

// The requested computation exceeds a configured budget.
class ResourceError : public std::runtime_error {
  public:
	ResourceError(const std::string &what, double required)
		: std::runtime_error(what), required_(required)
	{}

	// Estimated amount of work (states, nodes) that would have been needed.
	double required() const { return required_; }

  private:
	double required_;
};

} // namespace lgt

#pragma once

#include <cstdint>
#include <limits>

namespace lgt {

// Counter-based generator: output i of stream s is splitmix64's finaliser
// applied to key(seed, s) + (i + 1) * golden gamma. Streams derived from
// one seed are independent of how many threads consume them.
class CounterRng
{
  public:
	using result_type = std::uint64_t;

	explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

	static constexpr result_type min() { return 0; }
	static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

	result_type operator()() { return mix(key_ + kGamma * ++counter_); }

	// Uniform in [0, 1) with 53 random bits.
	double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

	// Uniform integer in [0, n), unbiased.
	std::uint64_t below(std::uint64_t n);

	CounterRng split(std::uint64_t stream) const { return CounterRng(key_, stream + 1); }
	std::uint64_t counter() const { return counter_; }

	static std::uint64_t mix(std::uint64_t z)
	{
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
		return z ^ (z >> 31);
	}

  private:
	static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
	std::uint64_t key_;
	std::uint64_t counter_ = 0;
};

inline CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
	: key_(mix(seed ^ mix(stream * kGamma + 0x632be59bd9b4e019ULL)))
{}

inline std::uint64_t CounterRng::below(std::uint64_t n)
{
	if (n <= 1)
		return 0;
	std::uint64_t limit = max() - max() % n;
	std::uint64_t x;
	do
		x = (*this)();
	while (x >= limit);
	return x % n;
}

} // namespace lgt

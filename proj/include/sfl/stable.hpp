#ifndef SFL_STABLE_HPP
#define SFL_STABLE_HPP

#include <cstdint>
#include <random>

namespace sfl {

// Deterministic random source with derived substreams. Replication r of a
// run seeded with s always uses substream(s, r), independent of threading,
// so datasets are bit-reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(mix(seed)) {}

  static uint64_t substream_seed(uint64_t master, uint64_t index);
  static Rng substream(uint64_t master, uint64_t index) {
    return Rng(substream_seed(master, index));
  }

  uint64_t next() { return eng_(); }

  // Uniform on the open interval (0,1).
  double uniform() { return (double(eng_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double exponential() { return -std::log(uniform()); }
  int sign_flip() { return (eng_() >> 63) ? 1 : -1; }

 private:
  static uint64_t mix(uint64_t x);
  std::mt19937_64 eng_;
};

// The stable tail constant C_alpha: x^alpha P(|X| > x) -> C_alpha for a
// standard SaS variate. Equals (1-alpha)/(Gamma(2-alpha) cos(pi alpha/2))
// for alpha != 1 and 2/pi at alpha = 1.
double tail_constant(double alpha);

// Standard symmetric alpha-stable variate (unit scale: characteristic
// function exp(-|theta|^alpha)) via the trigonometric transform of a uniform
// angle and an exponential.
double sample_standard_sas(double alpha, Rng& rng);

}  // namespace sfl

#endif  // SFL_STABLE_HPP

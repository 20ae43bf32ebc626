#include "sfl/stable.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfl {

uint64_t Rng::mix(uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t Rng::substream_seed(uint64_t master, uint64_t index) {
  return mix(master ^ mix(index + 0x0123456789abcdefull));
}

double tail_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("tail_constant: alpha must lie in (0, 2)");
  if (alpha == 1.0) return 2.0 / std::numbers::pi;
  return (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

double sample_standard_sas(double alpha, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("sample_standard_sas: alpha must lie in (0, 2)");
  const double u = std::numbers::pi * (rng.uniform() - 0.5);  // (-pi/2, pi/2)
  const double w = rng.exponential();
  if (alpha == 1.0) return std::tan(u);
  const double t1 = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
  const double t2 = std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
  return t1 * t2;
}

}  // namespace sfl

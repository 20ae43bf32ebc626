#ifndef SFL_MODEL_IO_HPP
#define SFL_MODEL_IO_HPP

#include <string>
#include <vector>

#include "sfl/action.hpp"

namespace sfl {

// A weighted box on the translation coordinates R^k; the kernel function is
// f(s) = sum_l w_l 1[s in [lo_l, hi_l]], constant on the torus factor.
// Bounds are kept as exact rationals (doubles convert exactly).
struct KernelBox {
  double weight = 1.0;
  std::vector<Rat> lo, hi;
};

struct FieldModel {
  ActionSpec spec;
  double alpha = 0.0;                 // 0 means "not specified"
  std::vector<KernelBox> kernel;
  std::string digest;                 // content hash of the source document

  bool has_field() const { return alpha > 0.0 && !kernel.empty(); }
  void validate() const;              // box shapes, alpha range, positive volumes
};

// Thrown on malformed model documents; message carries line/column context
// when the underlying JSON is syntactically broken.
struct ModelFormatError : std::runtime_error {
  explicit ModelFormatError(const std::string& what) : std::runtime_error(what) {}
};

// Parse the model JSON (action spec always; alpha/kernel when present).
FieldModel parse_model(const std::string& text);
FieldModel load_model(const std::string& path);

// Canonical JSON (exact rational strings, never floats for exact fields).
std::string model_to_json(const FieldModel& m);

// FNV-1a 64 content hash, 16 hex digits.
std::string content_digest(const std::string& bytes);

}  // namespace sfl

#endif  // SFL_MODEL_IO_HPP

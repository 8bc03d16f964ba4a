#include "vsm/similarity.hpp"

#include <cmath>

#include "vsm/error.hpp"

namespace vsm {

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::inner_product: return "inner_product";
    case Measure::cosine: return "cosine";
    case Measure::jaccard: return "jaccard";
    case Measure::dice: return "dice";
  }
  return "?";
}

std::string_view to_string(CosineMode m) noexcept {
  return m == CosineMode::paper_compat ? "paper_compat" : "consistent";
}

Measure parse_measure(std::string_view name) {
  for (auto m : kAllMeasures) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::bad_measure,
              "unknown measure '" + std::string(name) +
                  "' (expected inner_product, cosine, jaccard or dice)");
}

CosineMode parse_cosine_mode(std::string_view name) {
  if (name == "paper_compat") return CosineMode::paper_compat;
  if (name == "consistent") return CosineMode::consistent;
  throw Error(ErrorCode::bad_parameter, "unknown cosine mode '" + std::string(name) +
                                            "' (expected paper_compat or consistent)");
}

double inner_product(const WeightedVector& a, const WeightedVector& b) noexcept {
  // Walk the smaller vector, probe the larger.
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  double sum = 0.0;
  for (const auto& [term, w] : small) sum += w * large.get(term);
  return sum;
}

double squared_norm(const WeightedVector& v) noexcept {
  double sum = 0.0;
  for (const auto& [term, w] : v) sum += w * w;
  return sum;
}

double norm(const WeightedVector& v) noexcept { return std::sqrt(squared_norm(v)); }

double cosine_from_parts(double inner, double doc_sq, double query_sq) noexcept {
  const double denom = std::sqrt(doc_sq) * std::sqrt(query_sq);
  return denom > 0.0 ? inner / denom : 0.0;
}

double jaccard_from_parts(double inner, double doc_sq, double query_sq) noexcept {
  const double denom = doc_sq + query_sq - inner;
  return denom > 0.0 ? inner / denom : 0.0;
}

double dice_from_parts(double inner, double doc_sq, double query_sq) noexcept {
  const double denom = doc_sq + query_sq;
  return denom > 0.0 ? 2.0 * inner / denom : 0.0;
}

double cosine(const WeightedVector& d, const QueryVector& q, CosineMode mode) noexcept {
  const auto& numerator_query = mode == CosineMode::paper_compat ? q.raw : q.cosine_normalized;
  return cosine_from_parts(inner_product(d, numerator_query), squared_norm(d),
                           squared_norm(q.cosine_normalized));
}

double jaccard(const WeightedVector& d, const WeightedVector& q) noexcept {
  return jaccard_from_parts(inner_product(d, q), squared_norm(d), squared_norm(q));
}

double dice(const WeightedVector& d, const WeightedVector& q) noexcept {
  return dice_from_parts(inner_product(d, q), squared_norm(d), squared_norm(q));
}

double score(const WeightedVector& d, const QueryVector& q, Measure m,
             CosineMode mode) noexcept {
  switch (m) {
    case Measure::inner_product: return inner_product(d, q.raw);
    case Measure::cosine: return cosine(d, q, mode);
    case Measure::jaccard: return jaccard(d, q.raw);
    case Measure::dice: return dice(d, q.raw);
  }
  return 0.0;
}

}  // namespace vsm

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "vsm/index.hpp"

namespace vsm {

enum class Measure { inner_product, cosine, jaccard, dice };

/// How the cosine measure pairs query vectors.
///   paper_compat: inner(d, q.raw) / (|d| * |q.cosine_normalized|)
///   consistent:   inner(d, q.cosine_normalized) / (|d| * |q.cosine_normalized|)
enum class CosineMode { paper_compat, consistent };

std::string_view to_string(Measure m) noexcept;
std::string_view to_string(CosineMode m) noexcept;
/// Throws Error{bad_measure}.
Measure parse_measure(std::string_view name);
/// Throws Error{bad_parameter}.
CosineMode parse_cosine_mode(std::string_view name);

inline constexpr Measure kAllMeasures[] = {Measure::inner_product, Measure::cosine,
                                           Measure::jaccard, Measure::dice};

/// A query in both weightings used by the measures.
///   raw(t)               = idf(t) for every query term present
///   cosine_normalized(t) = (tf(t) / max_tf) * idf(t)
struct QueryVector {
  WeightedVector raw;
  WeightedVector cosine_normalized;
  std::uint32_t max_tf = 0;

  bool empty() const noexcept { return raw.empty(); }
};

double inner_product(const WeightedVector& a, const WeightedVector& b) noexcept;
double squared_norm(const WeightedVector& v) noexcept;
double norm(const WeightedVector& v) noexcept;

// Scalar forms shared by the vector functions below and by the
// term-at-a-time scorer. A non-positive denominator yields 0.
double cosine_from_parts(double inner, double doc_squared_norm,
                         double query_squared_norm) noexcept;
double jaccard_from_parts(double inner, double doc_squared_norm,
                          double query_squared_norm) noexcept;
double dice_from_parts(double inner, double doc_squared_norm,
                       double query_squared_norm) noexcept;

double cosine(const WeightedVector& d, const QueryVector& q,
              CosineMode mode = CosineMode::consistent) noexcept;
double jaccard(const WeightedVector& d, const WeightedVector& q) noexcept;
double dice(const WeightedVector& d, const WeightedVector& q) noexcept;

/// InnerProduct, Jaccard and Dice score against q.raw; Cosine uses `mode`.
double score(const WeightedVector& d, const QueryVector& q, Measure m,
             CosineMode mode = CosineMode::consistent) noexcept;

}  // namespace vsm

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bismarck {

/// Input/config/data errors surfaced to the CLI as exit code 1.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failures (overflow to non-finite values) abort the run.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExampleKind : std::uint8_t { Dense, Sparse, MatrixCell };

// One training tuple. Owning form, produced by the parsers; the hot loops
// use ExampleView into the columnar Dataset storage instead.
struct Example {
    ExampleKind kind = ExampleKind::Dense;
    std::vector<double> values;      // dense features, or sparse values
    std::vector<std::uint32_t> indices;  // sparse feature indices, strictly increasing
    double label = 0.0;              // y; for MatrixCell this is M_ij
    std::uint32_t row = 0;           // MatrixCell i
    std::uint32_t col = 0;           // MatrixCell j
};

struct ExampleView {
    ExampleKind kind = ExampleKind::Dense;
    std::span<const double> values;
    std::span<const std::uint32_t> indices;
    double label = 0.0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;
};

inline ExampleView view_of(const Example& e) {
    return ExampleView{e.kind, e.values, e.indices, e.label, e.row, e.col};
}

}  // namespace bismarck

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace bismarck {

// The optimization variable: either a dense coefficient vector w, or a
// factor pair (L, R) for low-rank matrix factorization. Factor matrices are
// row-major with one row per entity, so a single cell update touches two
// contiguous rows. All parameters also admit a flat index space
// [0, param_count()) -- L first, then R -- used by gradient updates and the
// shared-memory schemes.
struct Model {
    enum class Kind : std::uint8_t { Vector, Factors };

    Kind kind = Kind::Vector;
    std::vector<double> coef;  // Vector: length d
    std::uint32_t rows = 0, cols = 0, rank = 0;
    std::vector<double> lfac, rfac;  // Factors: rows*rank and cols*rank

    static Model vector(std::size_t d) {
        Model m;
        m.kind = Kind::Vector;
        m.coef.assign(d, 0.0);
        return m;
    }

    static Model factors(std::uint32_t rows, std::uint32_t cols, std::uint32_t rank) {
        Model m;
        m.kind = Kind::Factors;
        m.rows = rows;
        m.cols = cols;
        m.rank = rank;
        m.lfac.assign(static_cast<std::size_t>(rows) * rank, 0.0);
        m.rfac.assign(static_cast<std::size_t>(cols) * rank, 0.0);
        return m;
    }

    std::size_t param_count() const {
        return kind == Kind::Vector ? coef.size() : lfac.size() + rfac.size();
    }

    double* params(std::size_t flat) {
        if (kind == Kind::Vector) return coef.data() + flat;
        return flat < lfac.size() ? lfac.data() + flat : rfac.data() + (flat - lfac.size());
    }
    const double* params(std::size_t flat) const {
        return const_cast<Model*>(this)->params(flat);
    }

    double* lrow(std::uint32_t i) { return lfac.data() + static_cast<std::size_t>(i) * rank; }
    const double* lrow(std::uint32_t i) const {
        return lfac.data() + static_cast<std::size_t>(i) * rank;
    }
    double* rrow(std::uint32_t j) { return rfac.data() + static_cast<std::size_t>(j) * rank; }
    const double* rrow(std::uint32_t j) const {
        return rfac.data() + static_cast<std::size_t>(j) * rank;
    }

    /// Flat index of the first parameter of L row i / R row j.
    std::size_t lrow_offset(std::uint32_t i) const { return static_cast<std::size_t>(i) * rank; }
    std::size_t rrow_offset(std::uint32_t j) const {
        return lfac.size() + static_cast<std::size_t>(j) * rank;
    }

    bool same_shape(const Model& o) const {
        if (kind != o.kind) return false;
        if (kind == Kind::Vector) return coef.size() == o.coef.size();
        return rows == o.rows && cols == o.cols && rank == o.rank;
    }

    bool all_finite() const {
        for (double v : coef)
            if (!std::isfinite(v)) return false;
        for (double v : lfac)
            if (!std::isfinite(v)) return false;
        for (double v : rfac)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

}  // namespace bismarck

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bismarck/prox.hpp"
#include "bismarck/rng.hpp"
#include "bismarck/tasks.hpp"
#include "support/oracles.hpp"

using namespace bismarck;

namespace {

Example dense_example(std::vector<double> x, double y) {
    Example e;
    e.kind = ExampleKind::Dense;
    e.values = std::move(x);
    e.label = y;
    return e;
}

TaskSpec vector_task(TaskKind kind, std::uint32_t d, RegKind reg = RegKind::None,
                     double mu = 0.0) {
    TaskSpec t;
    t.task = kind;
    t.dim = d;
    t.reg = reg;
    t.mu = mu;
    return t;
}

Model vector_model(std::vector<double> w) {
    Model m = Model::vector(w.size());
    m.coef = std::move(w);
    return m;
}

double rel_err(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-9);
}

}  // namespace

TEST_CASE("gradient values from worked examples") {
    GradientUpdate u;

    // LR at w = 0: sigmoid(0) = 1/2, gradient is -x/2.
    const auto lr = vector_task(TaskKind::Logistic, 2);
    grad(lr, vector_model({0, 0}), view_of(dense_example({1, 2}, +1)), u);
    const auto g = u.to_dense(2);
    CHECK(g[0] == doctest::Approx(-0.5));
    CHECK(g[1] == doctest::Approx(-1.0));

    // SVM with the margin satisfied: no update at all.
    const auto svm = vector_task(TaskKind::Svm, 2);
    grad(svm, vector_model({1, 1}), view_of(dense_example({1, 1}, +1)), u);
    CHECK(u.empty());

    // LMF rank 1: residual e = 2 - 1 = 1, dL = 2*e*R = 4, dR = 2*e*L = 2.
    TaskSpec lmf;
    lmf.task = TaskKind::Lmf;
    lmf.rows = 1;
    lmf.cols = 1;
    lmf.rank = 1;
    Model fm = Model::factors(1, 1, 1);
    fm.lfac = {1.0};
    fm.rfac = {2.0};
    Example cell;
    cell.kind = ExampleKind::MatrixCell;
    cell.row = 0;
    cell.col = 0;
    cell.label = 1.0;
    grad(lmf, fm, view_of(cell), u);
    const auto gf = u.to_dense(2);
    CHECK(gf[0] == doctest::Approx(4.0));
    CHECK(gf[1] == doctest::Approx(2.0));
}

TEST_CASE("loss terms from worked examples") {
    CHECK(loss_term(vector_task(TaskKind::Logistic, 2), vector_model({0, 0}),
                    view_of(dense_example({3, -1}, +1))) == doctest::Approx(std::log(2.0)));
    CHECK(loss_term(vector_task(TaskKind::Svm, 1), vector_model({2}),
                    view_of(dense_example({1}, +1))) == 0.0);  // margin 2
    CHECK(loss_term(vector_task(TaskKind::LeastSquares, 1), vector_model({0.5}),
                    view_of(dense_example({1}, 1))) == doctest::Approx(0.125));
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(314);
    GradientUpdate u;

    auto random_model = [&](std::uint32_t d) {
        std::vector<double> w(d);
        for (double& x : w) x = rng.uniform(-1.5, 1.5);
        return vector_model(std::move(w));
    };

    for (TaskKind kind : {TaskKind::LeastSquares, TaskKind::Logistic, TaskKind::Svm}) {
        const std::uint32_t d = 6;
        const auto task = vector_task(kind, d);
        int checked = 0;
        while (checked < 100) {
            const Model m = random_model(d);
            std::vector<double> x(d);
            for (double& v : x) v = rng.uniform(-1.5, 1.5);
            const double y = rng.below(2) ? 1.0 : -1.0;
            const Example ex = dense_example(x, y);
            if (kind == TaskKind::Svm) {
                double s = 0.0;
                for (std::uint32_t j = 0; j < d; ++j) s += m.coef[j] * x[j];
                if (std::fabs(1.0 - y * s) <= 1e-3) continue;  // hinge kink excluded
            }
            grad(task, m, view_of(ex), u);
            const auto fd = oracles::fd_gradient(task, m, view_of(ex));
            CHECK(rel_err(u.to_dense(d), fd) <= 1e-5);
            ++checked;
        }
    }

    // LMF, including the distributed Frobenius penalty.
    TaskSpec lmf;
    lmf.task = TaskKind::Lmf;
    lmf.rows = 4;
    lmf.cols = 3;
    lmf.rank = 2;
    lmf.reg = RegKind::L2Squared;
    lmf.mu = 0.3;
    lmf.row_cells = {2, 3, 1, 2};
    lmf.col_cells = {3, 3, 2};
    for (int it = 0; it < 100; ++it) {
        Model m = Model::factors(4, 3, 2);
        for (double& v : m.lfac) v = rng.uniform(-1, 1);
        for (double& v : m.rfac) v = rng.uniform(-1, 1);
        Example cell;
        cell.kind = ExampleKind::MatrixCell;
        cell.row = static_cast<std::uint32_t>(rng.below(4));
        cell.col = static_cast<std::uint32_t>(rng.below(3));
        cell.label = rng.uniform(-2, 2);
        grad(lmf, m, view_of(cell), u);
        const auto fd = oracles::fd_gradient(lmf, m, view_of(cell));
        CHECK(rel_err(u.to_dense(m.param_count()), fd) <= 1e-5);
    }
}

TEST_CASE("sparse and dense encodings produce the same update") {
    Rng rng(55);
    GradientUpdate ud, us;
    const std::uint32_t d = 12;
    for (TaskKind kind : {TaskKind::LeastSquares, TaskKind::Logistic, TaskKind::Svm}) {
        const auto task = vector_task(kind, d);
        for (int it = 0; it < 50; ++it) {
            Model m = vector_model(std::vector<double>(d));
            for (double& v : m.coef) v = rng.uniform(-1, 1);
            Example sparse;
            sparse.kind = ExampleKind::Sparse;
            std::uint32_t idx = static_cast<std::uint32_t>(rng.below(3));
            while (idx < d) {
                sparse.indices.push_back(idx);
                sparse.values.push_back(rng.uniform(-2, 2));
                idx += 1 + static_cast<std::uint32_t>(rng.below(4));
            }
            sparse.label = rng.below(2) ? 1.0 : -1.0;
            Example dense = dense_example(std::vector<double>(d, 0.0), sparse.label);
            for (std::size_t t = 0; t < sparse.indices.size(); ++t) {
                dense.values[sparse.indices[t]] = sparse.values[t];
            }
            grad(task, m, view_of(dense), ud);
            grad(task, m, view_of(sparse), us);
            const auto gd = ud.to_dense(d);
            const auto gs = us.to_dense(d);
            for (std::uint32_t j = 0; j < d; ++j) CHECK(gd[j] == gs[j]);
        }
    }
}

TEST_CASE("LMF updates touch exactly the two factor rows") {
    TaskSpec lmf;
    lmf.task = TaskKind::Lmf;
    lmf.rows = 5;
    lmf.cols = 4;
    lmf.rank = 3;
    Model m = Model::factors(5, 4, 3);
    Rng rng(8);
    for (double& v : m.lfac) v = rng.uniform(-1, 1);
    for (double& v : m.rfac) v = rng.uniform(-1, 1);
    Example cell;
    cell.kind = ExampleKind::MatrixCell;
    cell.row = 2;
    cell.col = 1;
    cell.label = 0.7;
    GradientUpdate u;
    grad(lmf, m, view_of(cell), u);
    REQUIRE(u.runs.size() == 2);
    CHECK(u.runs[0].param_start == m.lrow_offset(2));
    CHECK(u.runs[0].len == 3);
    CHECK(u.runs[1].param_start == m.rrow_offset(1));
    CHECK(u.runs[1].len == 3);
    CHECK(u.index.empty());
}

TEST_CASE("portfolio gradient is p + 2 Sigma w") {
    TaskSpec t;
    t.task = TaskKind::Portfolio;
    t.dim = 2;
    t.reg = RegKind::Simplex;
    t.returns = {0.1, -0.2};
    t.covariance = {2.0, 0.5, 0.5, 1.0};
    t.validate();
    const Model m = vector_model({0.25, 0.75});
    GradientUpdate u;
    Example dummy = dense_example({0, 0}, 0);
    grad(t, m, view_of(dummy), u);
    const auto g = u.to_dense(2);
    CHECK(g[0] == doctest::Approx(0.1 + 2 * (2.0 * 0.25 + 0.5 * 0.75)));
    CHECK(g[1] == doctest::Approx(-0.2 + 2 * (0.5 * 0.25 + 1.0 * 0.75)));

    TaskSpec bad = t;
    bad.covariance[1] = 0.5 + 1e-9;  // symmetry broken beyond 1e-12
    CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("predictions") {
    const auto svm = vector_task(TaskKind::Svm, 2);
    const Prediction p = predict(svm, vector_model({1, -1}), view_of(dense_example({2, 1}, 0)));
    CHECK(p.score == doctest::Approx(1.0));
    CHECK(p.label == 1);

    const Prediction tie = predict(svm, vector_model({0, 0}), view_of(dense_example({3, 4}, 0)));
    CHECK(tie.score == 0.0);
    CHECK(tie.label == 1);  // tie broken to +1

    TaskSpec lmf;
    lmf.task = TaskKind::Lmf;
    lmf.rows = 1;
    lmf.cols = 1;
    lmf.rank = 2;
    Model fm = Model::factors(1, 1, 2);
    fm.lfac = {1.0, 2.0};
    fm.rfac = {3.0, 1.0};
    Example cell;
    cell.kind = ExampleKind::MatrixCell;
    CHECK(predict(lmf, fm, view_of(cell)).score == doctest::Approx(5.0));

    TaskSpec pf;
    pf.task = TaskKind::Portfolio;
    pf.dim = 2;
    pf.reg = RegKind::Simplex;
    pf.returns = {0, 0};
    pf.covariance = {1, 0, 0, 1};
    CHECK_THROWS_AS(predict(pf, vector_model({1, 0}), view_of(dense_example({0, 0}, 0))),
                    DataError);
}

TEST_CASE("prox worked examples and oracles") {
    // L1 shrink, alpha*mu = 0.2.
    std::vector<double> v = {0.5, -0.1};
    prox(RegKind::L1, 0.2, 1.0, v);
    CHECK(v[0] == doctest::Approx(0.3));
    CHECK(v[1] == 0.0);
    CHECK(oracles::grid_min_soft_threshold(0.5, 0.2, -2, 2, 40000) ==
          doctest::Approx(0.3).epsilon(1e-4));
    CHECK(oracles::grid_min_soft_threshold(-0.1, 0.2, -2, 2, 40000) ==
          doctest::Approx(0.0).epsilon(1e-4));

    // L2Squared closed form.
    std::vector<double> w = {1.0, -2.0};
    prox(RegKind::L2Squared, 0.5, 0.5, w);
    CHECK(w[0] == doctest::Approx(1.0 / 1.5));
    CHECK(w[1] == doctest::Approx(-2.0 / 1.5));

    // Simplex projections, against the 2-D brute force.
    std::vector<double> feasible = {0.5, 0.5};
    prox(RegKind::Simplex, 0.0, 1.0, feasible);
    CHECK(feasible[0] == doctest::Approx(0.5));
    std::vector<double> corner = {2.0, 0.0};
    prox(RegKind::Simplex, 0.0, 1.0, corner);
    CHECK(corner[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(corner[1] == doctest::Approx(0.0).epsilon(1e-9));
    const auto brute = oracles::simplex_grid_projection_2d({2.0, 0.0}, 2000);
    CHECK(brute[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("prox outputs beat random perturbations") {
    Rng rng(2024);
    const struct {
        RegKind reg;
        double mu;
    } cases[] = {{RegKind::L1, 0.4},
                 {RegKind::L2Squared, 0.7},
                 {RegKind::NonNegative, 0.0},
                 {RegKind::Simplex, 0.0}};
    for (const auto& c : cases) {
        for (int it = 0; it < 20; ++it) {
            const std::size_t d = 1 + rng.below(6);
            std::vector<double> v(d);
            for (double& x : v) x = rng.uniform(-2, 2);
            const double alpha = rng.uniform(0.01, 1.0);
            std::vector<double> out = v;
            prox(c.reg, c.mu, alpha, out);
            const double obj = oracles::prox_objective(c.reg, c.mu, alpha, v, out);
            for (int p = 0; p < 1000; ++p) {
                std::vector<double> cand(d);
                for (std::size_t i = 0; i < d; ++i) {
                    cand[i] = out[i] + rng.uniform(-0.3, 0.3);
                }
                if (c.reg == RegKind::NonNegative) {
                    for (double& x : cand) x = std::max(x, 0.0);
                } else if (c.reg == RegKind::Simplex) {
                    double s = 0.0;
                    for (double& x : cand) {
                        x = std::max(x, 0.0);
                        s += x;
                    }
                    if (s <= 0) continue;
                    for (double& x : cand) x /= s;
                }
                CHECK(obj <= oracles::prox_objective(c.reg, c.mu, alpha, v, cand) + 1e-9);
            }
        }
    }
}

TEST_CASE("simplex projection is feasible for any input") {
    Rng rng(77);
    for (int it = 0; it < 300; ++it) {
        const std::size_t d = 1 + rng.below(8);
        std::vector<double> v(d);
        for (double& x : v) x = rng.uniform(-4, it % 3 == 0 ? -0.1 : 4.0);  // incl. all-negative
        prox(RegKind::Simplex, 0.0, 1.0, v);
        double s = 0.0;
        for (double x : v) {
            CHECK(x >= 0.0);
            s += x;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("task validation catches bad specs") {
    CHECK_THROWS_AS(vector_task(TaskKind::Logistic, 0).validate(), DataError);
    auto t = vector_task(TaskKind::LeastSquares, 3, RegKind::L1, -1.0);
    CHECK_THROWS_AS(t.validate(), DataError);
    TaskSpec lmf;
    lmf.task = TaskKind::Lmf;
    lmf.rows = 2;
    lmf.cols = 2;
    lmf.rank = 1;
    lmf.reg = RegKind::L1;
    CHECK_THROWS_AS(lmf.validate(), DataError);
}

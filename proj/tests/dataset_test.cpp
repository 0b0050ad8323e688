#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bismarck/dataset.hpp"
#include "bismarck/rng.hpp"

using namespace bismarck;

namespace {

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

}  // namespace

TEST_CASE("dense parser") {
    const Example e = parse_dense("1,0.5,2.0", 1, true);
    CHECK(e.label == 1.0);
    REQUIRE(e.values.size() == 2);
    CHECK(e.values[0] == 0.5);
    CHECK(e.values[1] == 2.0);

    const Example neg = parse_dense("-1,0,0", 2, true);
    CHECK(neg.label == -1.0);
    CHECK(neg.values == std::vector<double>{0.0, 0.0});

    CHECK_THROWS_AS(parse_dense("2,1.0", 3, true), DataError);   // bad class label
    CHECK_THROWS_AS(parse_dense("1,abc", 4, false), DataError);  // non-numeric
    CHECK_THROWS_AS(parse_dense("1", 5, false), DataError);      // no features
    CHECK_THROWS_WITH(parse_dense("1,x", 7, false),
                      doctest::Contains("line 7"));  // location reported
}

TEST_CASE("sparse parser") {
    const Example e = parse_sparse("1 2:0.5 7:1.25", 1, true);
    CHECK(e.label == 1.0);
    CHECK(e.indices == std::vector<std::uint32_t>{2, 7});
    CHECK(e.values == std::vector<double>{0.5, 1.25});

    const Example empty = parse_sparse("-1", 2, true);
    CHECK(empty.label == -1.0);
    CHECK(empty.values.empty());

    CHECK_THROWS_AS(parse_sparse("1 7:1 2:5", 3, false), DataError);  // not ascending
    CHECK_THROWS_AS(parse_sparse("1 3:1 3:2", 4, false), DataError);  // duplicate
    CHECK_THROWS_AS(parse_sparse("1 oops", 5, false), DataError);     // malformed pair
}

TEST_CASE("triple parser") {
    const Example e = parse_triple("0,3,4.5", 1);
    CHECK(e.row == 0);
    CHECK(e.col == 3);
    CHECK(e.label == 4.5);

    const Example z = parse_triple("5,5,0", 2);
    CHECK(z.row == 5);
    CHECK(z.label == 0.0);

    CHECK_THROWS_WITH(parse_triple("a,1,2", 9), doctest::Contains("line 9"));
    CHECK_THROWS_AS(parse_triple("-1,2,3", 1), DataError);  // negative index
    CHECK_THROWS_AS(parse_triple("1,2", 1), DataError);
}

TEST_CASE("serialize/parse round-trips random examples") {
    Rng rng(99);
    for (int it = 0; it < 200; ++it) {
        Example e;
        const int kind = static_cast<int>(rng.below(3));
        if (kind == 0) {
            e.kind = ExampleKind::Dense;
            const std::size_t d = 1 + rng.below(6);
            for (std::size_t i = 0; i < d; ++i) e.values.push_back(rng.uniform(-10, 10));
            e.label = rng.below(2) ? 1.0 : -1.0;
            const Example back = parse_dense(serialize_example(e));
            CHECK(back.values == e.values);
            CHECK(back.label == e.label);
        } else if (kind == 1) {
            e.kind = ExampleKind::Sparse;
            std::uint32_t idx = 0;
            const std::size_t nnz = rng.below(5);
            for (std::size_t t = 0; t < nnz; ++t) {
                idx += 1 + static_cast<std::uint32_t>(rng.below(10));
                e.indices.push_back(idx);
                e.values.push_back(rng.uniform(-5, 5));
            }
            e.label = rng.below(2) ? 1.0 : -1.0;
            const Example back = parse_sparse(serialize_example(e));
            CHECK(back.indices == e.indices);
            CHECK(back.values == e.values);
        } else {
            e.kind = ExampleKind::MatrixCell;
            e.row = static_cast<std::uint32_t>(rng.below(1000));
            e.col = static_cast<std::uint32_t>(rng.below(1000));
            e.label = rng.uniform(-3, 3);
            const Example back = parse_triple(serialize_example(e));
            CHECK(back.row == e.row);
            CHECK(back.col == e.col);
            CHECK(back.label == e.label);
        }
    }
}

TEST_CASE("ingestion infers dimensions and counts") {
    const std::string path = temp_file("bm_sparse_test.sparse");
    write_text(path, "1 2:0.5 7:1.25\n-1 0:1\n1 3:2\n");
    const Dataset ds = load_dataset(path, DataFormat::SparseIndexed, true);
    CHECK(ds.size() == 3);
    CHECK(ds.dim() == 8);  // 1 + max index
    CHECK(ds.header().count == 3);
    CHECK(ds.header().checksum != 0);
    std::remove(path.c_str());
}

TEST_CASE("matrix ingestion computes per-row/per-column cell counts") {
    const std::string path = temp_file("bm_cells_test.triples");
    write_text(path, "0,0,1\n0,1,2\n1,1,3\n2,0,4\n");
    const Dataset ds = load_dataset(path, DataFormat::MatrixTriples, false);
    CHECK(ds.rows() == 3);
    CHECK(ds.cols() == 2);
    CHECK(ds.row_cells() == std::vector<std::uint32_t>{2, 1, 1});
    CHECK(ds.col_cells() == std::vector<std::uint32_t>{2, 2});
    std::uint32_t row_total = 0, col_total = 0;
    for (auto c : ds.row_cells()) row_total += c;
    for (auto c : ds.col_cells()) col_total += c;
    CHECK(row_total == ds.size());
    CHECK(col_total == ds.size());
    std::remove(path.c_str());
}

TEST_CASE("declared dimensions win and mismatches fail") {
    const std::string path = temp_file("bm_declared.sparse");
    write_text(path, "# d=100\n1 2:0.5\n");
    const Dataset ds = load_dataset(path, DataFormat::SparseIndexed, false);
    CHECK(ds.dim() == 100);

    write_text(path, "# d=2\n1 5:0.5\n");
    CHECK_THROWS_AS(load_dataset(path, DataFormat::SparseIndexed, false), DataError);
    std::remove(path.c_str());
}

TEST_CASE("stored order is file order") {
    const std::string path = temp_file("bm_order.csv");
    write_text(path, "1,10\n-1,20\n1,30\n");
    const Dataset ds = load_dataset(path, DataFormat::DenseCsv, false);
    CHECK(ds.view(0).values[0] == 10.0);
    CHECK(ds.view(1).values[0] == 20.0);
    CHECK(ds.view(2).values[0] == 30.0);

    const Dataset rev = ds.permuted({2, 1, 0});
    CHECK(rev.view(0).values[0] == 30.0);
    CHECK(rev.view(2).values[0] == 10.0);
    std::remove(path.c_str());
}

TEST_CASE("dataset write/load round-trip") {
    const std::string path = temp_file("bm_roundtrip.csv");
    Dataset ds(DataFormat::DenseCsv);
    Example e;
    e.kind = ExampleKind::Dense;
    e.values = {0.1, -2.5};
    e.label = 1.0;
    ds.append(e);
    e.values = {1.0 / 3.0, 1e-17};
    e.label = -1.0;
    ds.append(e);
    ds.finalize();
    ds.write_file(path);

    const Dataset back = load_dataset(path, DataFormat::DenseCsv, false);
    REQUIRE(back.size() == 2);
    CHECK(back.view(1).values[0] == 1.0 / 3.0);
    CHECK(back.view(1).values[1] == 1e-17);
    std::remove(path.c_str());
}

TEST_CASE("empty dataset is an ingestion error") {
    const std::string path = temp_file("bm_empty.csv");
    write_text(path, "");
    CHECK_THROWS_AS(load_dataset(path, DataFormat::DenseCsv, false), DataError);
    std::remove(path.c_str());
}

TEST_CASE("arity mismatches are rejected") {
    const std::string path = temp_file("bm_arity.csv");
    write_text(path, "1,1,2\n1,3\n");
    CHECK_THROWS_AS(load_dataset(path, DataFormat::DenseCsv, false), DataError);
    std::remove(path.c_str());
}

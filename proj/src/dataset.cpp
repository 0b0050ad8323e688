#include "bismarck/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bismarck {

namespace {

std::string location(std::size_t line_no) {
    return line_no ? " (line " + std::to_string(line_no) + ")" : "";
}

double parse_number(std::string_view field, std::size_t line_no, const char* what) {
    // Trim surrounding spaces; from_chars is locale-independent by design.
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                              field.back() == '\r')) {
        field.remove_suffix(1);
    }
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw DataError(std::string("non-numeric ") + what + " '" + std::string(field) + "'" +
                        location(line_no));
    }
    return out;
}

std::uint64_t parse_index(std::string_view field, std::size_t line_no, const char* what) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw DataError(std::string("bad ") + what + " '" + std::string(field) + "'" +
                        location(line_no));
    }
    return out;
}

double validate_label(double y, bool classification, std::size_t line_no) {
    if (classification && y != 1.0 && y != -1.0) {
        throw DataError("classification label must be -1 or +1, got " + std::to_string(y) +
                        location(line_no));
    }
    return y;
}

void append_shortest(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    out.append(buf, ptr);
}

}  // namespace

const char* format_name(DataFormat f) {
    switch (f) {
        case DataFormat::DenseCsv: return "dense";
        case DataFormat::SparseIndexed: return "sparse";
        case DataFormat::MatrixTriples: return "matrix";
    }
    return "?";
}

std::optional<DataFormat> format_from_name(const std::string& name) {
    if (name == "dense") return DataFormat::DenseCsv;
    if (name == "sparse") return DataFormat::SparseIndexed;
    if (name == "matrix") return DataFormat::MatrixTriples;
    return std::nullopt;
}

std::optional<DataFormat> format_from_path(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return std::nullopt;
    const std::string ext = path.substr(dot + 1);
    if (ext == "csv" || ext == "dense") return DataFormat::DenseCsv;
    if (ext == "sparse" || ext == "svm") return DataFormat::SparseIndexed;
    if (ext == "triples" || ext == "mtx") return DataFormat::MatrixTriples;
    return std::nullopt;
}

Example parse_dense(const std::string& line, std::size_t line_no, bool classification) {
    Example e;
    e.kind = ExampleKind::Dense;
    std::size_t start = 0;
    bool first = true;
    while (start <= line.size()) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) comma = line.size();
        const std::string_view field(line.data() + start, comma - start);
        if (first) {
            e.label = validate_label(parse_number(field, line_no, "label"), classification,
                                     line_no);
            first = false;
        } else {
            e.values.push_back(parse_number(field, line_no, "feature"));
        }
        start = comma + 1;
    }
    if (e.values.empty()) throw DataError("dense example has no features" + location(line_no));
    return e;
}

Example parse_sparse(const std::string& line, std::size_t line_no, bool classification) {
    Example e;
    e.kind = ExampleKind::Sparse;
    std::istringstream in(line);
    std::string tok;
    if (!(in >> tok)) throw DataError("empty line" + location(line_no));
    e.label = validate_label(parse_number(tok, line_no, "label"), classification, line_no);
    std::int64_t prev = -1;
    while (in >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 >= tok.size()) {
            throw DataError("malformed index:value pair '" + tok + "'" + location(line_no));
        }
        const std::uint64_t idx = parse_index(std::string_view(tok).substr(0, colon), line_no,
                                              "feature index");
        if (static_cast<std::int64_t>(idx) <= prev) {
            throw DataError("feature indices not strictly ascending" + location(line_no));
        }
        prev = static_cast<std::int64_t>(idx);
        e.indices.push_back(static_cast<std::uint32_t>(idx));
        e.values.push_back(parse_number(std::string_view(tok).substr(colon + 1), line_no,
                                        "feature value"));
    }
    return e;
}

Example parse_triple(const std::string& line, std::size_t line_no) {
    Example e;
    e.kind = ExampleKind::MatrixCell;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        throw DataError("matrix cell needs 'i,j,value'" + location(line_no));
    }
    e.row = static_cast<std::uint32_t>(
        parse_index(std::string_view(line).substr(0, c1), line_no, "row index"));
    e.col = static_cast<std::uint32_t>(
        parse_index(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), line_no, "column index"));
    e.label = parse_number(std::string_view(line).substr(c2 + 1), line_no, "cell value");
    return e;
}

std::string serialize_example(const Example& e) {
    std::string out;
    switch (e.kind) {
        case ExampleKind::Dense:
            append_shortest(out, e.label);
            for (double v : e.values) {
                out.push_back(',');
                append_shortest(out, v);
            }
            break;
        case ExampleKind::Sparse:
            append_shortest(out, e.label);
            for (std::size_t t = 0; t < e.values.size(); ++t) {
                out.push_back(' ');
                out += std::to_string(e.indices[t]);
                out.push_back(':');
                append_shortest(out, e.values[t]);
            }
            break;
        case ExampleKind::MatrixCell:
            out += std::to_string(e.row);
            out.push_back(',');
            out += std::to_string(e.col);
            out.push_back(',');
            append_shortest(out, e.label);
            break;
    }
    return out;
}

void Dataset::declare_dim(std::uint32_t d) {
    header_.dim = d;
    declared_dim_ = true;
}

void Dataset::declare_shape(std::uint32_t rows, std::uint32_t cols) {
    header_.rows = rows;
    header_.cols = cols;
    declared_shape_ = true;
}

void Dataset::append(const Example& e) {
    switch (e.kind) {
        case ExampleKind::Dense: {
            if (header_.format != DataFormat::DenseCsv) {
                throw DataError("dense example appended to non-dense dataset");
            }
            if (!offsets_.empty()) {
                const std::uint64_t width = offsets_.size() == 1
                                                ? values_.size()
                                                : offsets_[1] - offsets_[0];
                if (e.values.size() != width) {
                    throw DataError("dense example arity " + std::to_string(e.values.size()) +
                                    " != " + std::to_string(width));
                }
            }
            if (declared_dim_ && e.values.size() != header_.dim) {
                throw DataError("dense example arity " + std::to_string(e.values.size()) +
                                " != declared d=" + std::to_string(header_.dim));
            }
            break;
        }
        case ExampleKind::Sparse:
            if (header_.format != DataFormat::SparseIndexed) {
                throw DataError("sparse example appended to non-sparse dataset");
            }
            if (declared_dim_ && !e.indices.empty() && e.indices.back() >= header_.dim) {
                throw DataError("feature index " + std::to_string(e.indices.back()) +
                                " out of declared d=" + std::to_string(header_.dim));
            }
            break;
        case ExampleKind::MatrixCell:
            if (header_.format != DataFormat::MatrixTriples) {
                throw DataError("matrix cell appended to non-matrix dataset");
            }
            if (declared_shape_ && (e.row >= header_.rows || e.col >= header_.cols)) {
                throw DataError("cell (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                                ") outside declared shape");
            }
            break;
    }
    if (offsets_.empty()) offsets_.push_back(0);
    labels_.push_back(e.label);
    values_.insert(values_.end(), e.values.begin(), e.values.end());
    indices_.insert(indices_.end(), e.indices.begin(), e.indices.end());
    offsets_.push_back(values_.size());
    if (e.kind == ExampleKind::MatrixCell) {
        cell_rows_.push_back(e.row);
        cell_cols_.push_back(e.col);
    }
    finalized_ = false;
}

void Dataset::finalize() {
    header_.count = labels_.size();
    if (offsets_.empty()) offsets_.push_back(0);
    switch (header_.format) {
        case DataFormat::DenseCsv:
            if (!declared_dim_ && !labels_.empty()) {
                header_.dim = static_cast<std::uint32_t>(offsets_[1] - offsets_[0]);
            }
            break;
        case DataFormat::SparseIndexed:
            if (!declared_dim_) {
                std::uint32_t max_idx = 0;
                bool any = false;
                for (std::uint32_t i : indices_) {
                    max_idx = std::max(max_idx, i);
                    any = true;
                }
                header_.dim = any ? max_idx + 1 : 0;
            }
            break;
        case DataFormat::MatrixTriples: {
            if (!declared_shape_) {
                std::uint32_t mr = 0, mc = 0;
                for (std::uint32_t r : cell_rows_) mr = std::max(mr, r + 1);
                for (std::uint32_t c : cell_cols_) mc = std::max(mc, c + 1);
                header_.rows = mr;
                header_.cols = mc;
            }
            row_cells_.assign(header_.rows, 0);
            col_cells_.assign(header_.cols, 0);
            for (std::uint32_t r : cell_rows_) ++row_cells_[r];
            for (std::uint32_t c : cell_cols_) ++col_cells_[c];
            break;
        }
    }
    finalized_ = true;
}

ExampleView Dataset::view(std::size_t i) const {
    ExampleView v;
    v.label = labels_[i];
    const std::size_t b = offsets_[i], e = offsets_[i + 1];
    switch (header_.format) {
        case DataFormat::DenseCsv:
            v.kind = ExampleKind::Dense;
            v.values = {values_.data() + b, e - b};
            break;
        case DataFormat::SparseIndexed:
            v.kind = ExampleKind::Sparse;
            v.values = {values_.data() + b, e - b};
            v.indices = {indices_.data() + b, e - b};
            break;
        case DataFormat::MatrixTriples:
            v.kind = ExampleKind::MatrixCell;
            v.row = cell_rows_[i];
            v.col = cell_cols_[i];
            break;
    }
    return v;
}

Example Dataset::owned(std::size_t i) const {
    const ExampleView v = view(i);
    Example e;
    e.kind = v.kind;
    e.values.assign(v.values.begin(), v.values.end());
    e.indices.assign(v.indices.begin(), v.indices.end());
    e.label = v.label;
    e.row = v.row;
    e.col = v.col;
    return e;
}

std::string Dataset::serialize_example(std::size_t i) const {
    return bismarck::serialize_example(owned(i));
}

void Dataset::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    std::string buf;
    for (std::size_t i = 0; i < size(); ++i) {
        buf = serialize_example(i);
        buf.push_back('\n');
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw DataError("write failed: " + path);
}

Dataset Dataset::permuted(const std::vector<std::uint32_t>& perm) const {
    Dataset out(header_.format);
    if (declared_dim_) out.declare_dim(header_.dim);
    if (declared_shape_) out.declare_shape(header_.rows, header_.cols);
    for (std::uint32_t src : perm) out.append(owned(src));
    out.finalize();
    out.header_.checksum = header_.checksum;
    return out;
}

Dataset load_dataset(const std::string& path, DataFormat format, bool classification) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open data file: " + path);
    Dataset ds(format);
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t checksum = fnv1a64(nullptr, 0);
    while (std::getline(in, line)) {
        ++line_no;
        checksum = fnv1a64(line.data(), line.size(), checksum);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            // Optional declarations: "# d=123" or "# m=12 n=34".
            std::uint32_t d = 0, m = 0, n = 0;
            if (std::sscanf(line.c_str(), "# d=%u", &d) == 1) {
                ds.declare_dim(d);
            } else if (std::sscanf(line.c_str(), "# m=%u n=%u", &m, &n) == 2) {
                ds.declare_shape(m, n);
            }
            continue;
        }
        switch (format) {
            case DataFormat::DenseCsv:
                ds.append(parse_dense(line, line_no, classification));
                break;
            case DataFormat::SparseIndexed:
                ds.append(parse_sparse(line, line_no, classification));
                break;
            case DataFormat::MatrixTriples:
                ds.append(parse_triple(line, line_no));
                break;
        }
    }
    if (ds.empty()) throw DataError("dataset is empty: " + path);
    ds.finalize();
    ds.set_checksum(checksum);
    return ds;
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace bismarck

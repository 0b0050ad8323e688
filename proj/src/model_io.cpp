#include "bismarck/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bismarck/dataset.hpp"

namespace bismarck {

namespace {

constexpr const char* kMagic = "BISMARCK-MODEL v1";

void append_value(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    out.append(buf, ptr);
    out.push_back('\n');
}

double parse_value(const std::string& line, std::size_t line_no) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), out);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
        throw DataError("model file: bad coefficient at line " + std::to_string(line_no));
    }
    return out;
}

}  // namespace

void save_model(const Model& model, const ModelMeta& meta, const std::string& path) {
    std::string body;
    body += kMagic;
    body.push_back('\n');
    body += "task ";
    body += task_name(meta.task);
    body.push_back('\n');
    if (model.kind == Model::Kind::Vector) {
        body += "dim " + std::to_string(model.coef.size()) + "\n";
    } else {
        body += "shape " + std::to_string(model.rows) + " " + std::to_string(model.cols) + " " +
                std::to_string(model.rank) + "\n";
    }
    body += "seed " + std::to_string(meta.seed) + "\n";
    {
        char buf[96];
        std::snprintf(buf, sizeof buf, "schedule %s %.17g %.17g\n",
                      schedule_name(meta.schedule.kind), meta.schedule.alpha0, meta.schedule.rho);
        body += buf;
        std::snprintf(buf, sizeof buf, "reg %s %.17g\n", reg_name(meta.reg), meta.mu);
        body += buf;
    }
    body += "epochs " + std::to_string(meta.epochs) + "\n";
    for (double v : model.coef) append_value(body, v);
    for (double v : model.lfac) append_value(body, v);
    for (double v : model.rfac) append_value(body, v);

    char sum[32];
    std::snprintf(sum, sizeof sum, "checksum %016" PRIx64 "\n",
                  fnv1a64(body.data(), body.size()));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open model file for writing: " + path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.write(sum, static_cast<std::streamsize>(std::strlen(sum)));
    if (!out) throw DataError("model write failed: " + path);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    std::stringstream whole;
    whole << in.rdbuf();
    const std::string text = whole.str();

    // Split off the trailing checksum line and verify it first.
    const auto tail = text.rfind("checksum ");
    if (tail == std::string::npos || tail == 0 || text[tail - 1] != '\n') {
        throw DataError("model file: missing checksum line (truncated?): " + path);
    }
    std::uint64_t want = 0;
    {
        const std::string line = text.substr(tail);
        if (std::sscanf(line.c_str(), "checksum %" SCNx64, &want) != 1) {
            throw DataError("model file: malformed checksum line: " + path);
        }
    }
    if (fnv1a64(text.data(), tail) != want) {
        throw DataError("model file: checksum mismatch (truncated or corrupted): " + path);
    }

    std::istringstream body(text.substr(0, tail));
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(body, line)) return false;
        ++line_no;
        return true;
    };

    if (!next_line() || line != kMagic) {
        throw DataError("model file: unknown magic/version: " + path);
    }

    LoadedModel out;
    bool have_dims = false;
    std::uint32_t dim = 0, rows = 0, cols = 0, rank = 0;
    while (next_line()) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "task") {
            std::string name;
            ls >> name;
            const auto t = task_from_name(name);
            if (!t) throw DataError("model file: unknown task '" + name + "'");
            out.meta.task = *t;
        } else if (key == "dim") {
            ls >> dim;
            have_dims = true;
        } else if (key == "shape") {
            ls >> rows >> cols >> rank;
            have_dims = true;
        } else if (key == "seed") {
            ls >> out.meta.seed;
        } else if (key == "schedule") {
            std::string name;
            ls >> name >> out.meta.schedule.alpha0 >> out.meta.schedule.rho;
            const auto k = schedule_from_name(name);
            if (!k) throw DataError("model file: unknown schedule '" + name + "'");
            out.meta.schedule.kind = *k;
        } else if (key == "reg") {
            std::string name;
            ls >> name >> out.meta.mu;
            const auto r = reg_from_name(name);
            if (!r) throw DataError("model file: unknown regularizer '" + name + "'");
            out.meta.reg = *r;
        } else if (key == "epochs") {
            ls >> out.meta.epochs;
            break;  // coefficients follow
        } else {
            throw DataError("model file: unexpected header line " + std::to_string(line_no));
        }
        if (ls.fail()) throw DataError("model file: malformed line " + std::to_string(line_no));
    }
    if (!have_dims) throw DataError("model file: missing dimensions: " + path);

    std::vector<double> values;
    while (next_line()) values.push_back(parse_value(line, line_no));

    if (rank > 0) {
        out.model = Model::factors(rows, cols, rank);
        const std::size_t ln = out.model.lfac.size();
        if (values.size() != ln + out.model.rfac.size()) {
            throw DataError("model file: coefficient count does not match shape");
        }
        std::copy(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(ln),
                  out.model.lfac.begin());
        std::copy(values.begin() + static_cast<std::ptrdiff_t>(ln), values.end(),
                  out.model.rfac.begin());
    } else {
        if (values.size() != dim) {
            throw DataError("model file: coefficient count does not match dim");
        }
        out.model = Model::vector(dim);
        std::copy(values.begin(), values.end(), out.model.coef.begin());
    }
    return out;
}

}  // namespace bismarck

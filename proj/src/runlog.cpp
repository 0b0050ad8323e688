#include "bismarck/runlog.hpp"

#include <charconv>
#include <fstream>

namespace bismarck {

namespace {

constexpr const char* kHeader = "epoch,objective,cum_seconds,epoch_seconds,shuffle_seconds";

void append_value(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    out.append(buf, ptr);
}

double parse_double(std::string_view s, const std::string& path) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("malformed run log field in " + path);
    }
    return v;
}

}  // namespace

void write_runlog(const std::string& path, const RunLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open run log for writing: " + path);
    std::string buf;
    for (const auto& [k, v] : log.config) {
        buf += "# ";
        buf += k;
        buf += "=";
        buf += v;
        buf += "\n";
    }
    buf += kHeader;
    buf += "\n";
    for (const EpochRow& r : log.rows) {
        buf += std::to_string(r.epoch);
        buf.push_back(',');
        append_value(buf, r.objective);
        buf.push_back(',');
        append_value(buf, r.cum_seconds);
        buf.push_back(',');
        append_value(buf, r.epoch_seconds);
        buf.push_back(',');
        append_value(buf, r.shuffle_seconds);
        buf.push_back('\n');
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("run log write failed: " + path);
}

RunLog read_runlog(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open run log: " + path);
    RunLog log;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string_view body = std::string_view(line).substr(1);
            if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            const auto eq = body.find('=');
            if (eq != std::string_view::npos) {
                log.config.emplace_back(std::string(body.substr(0, eq)),
                                        std::string(body.substr(eq + 1)));
            }
            continue;
        }
        if (!saw_header) {
            if (line != kHeader) throw DataError("unexpected run log header in " + path);
            saw_header = true;
            continue;
        }
        EpochRow row;
        std::size_t start = 0;
        int field = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            const std::string_view f(line.data() + start, comma - start);
            switch (field) {
                case 0: row.epoch = static_cast<std::uint32_t>(parse_double(f, path)); break;
                case 1: row.objective = parse_double(f, path); break;
                case 2: row.cum_seconds = parse_double(f, path); break;
                case 3: row.epoch_seconds = parse_double(f, path); break;
                case 4: row.shuffle_seconds = parse_double(f, path); break;
                default: throw DataError("too many run log fields in " + path);
            }
            ++field;
            start = comma + 1;
        }
        if (field != 5) throw DataError("run log row with " + std::to_string(field) +
                                        " fields in " + path);
        log.rows.push_back(row);
    }
    if (!saw_header) throw DataError("run log has no header: " + path);
    return log;
}

}  // namespace bismarck

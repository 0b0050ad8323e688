#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bismarck/train.hpp"

namespace bismarck {

// Per-run CSV log. Leading '#' lines echo the full configuration (enough to
// replay the run), then the pinned header:
//   epoch,objective,cum_seconds,epoch_seconds,shuffle_seconds
struct RunLog {
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<EpochRow> rows;
};

void write_runlog(const std::string& path, const RunLog& log);
RunLog read_runlog(const std::string& path);

}  // namespace bismarck

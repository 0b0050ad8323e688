#pragma once

#include <cstdint>
#include <string>

#include "bismarck/igd.hpp"
#include "bismarck/model.hpp"
#include "bismarck/tasks.hpp"

namespace bismarck {

// Model file, text, version-tagged:
//   BISMARCK-MODEL v1
//   task <ls|lr|svm|lmf|portfolio>
//   dim <d>            (vector)  |  shape <m> <n> <rank>   (factors)
//   seed <u64>
//   schedule <kind> <alpha0> <rho>
//   reg <kind> <mu>
//   epochs <n>
//   <one coefficient per line, shortest round-trip decimal; L rows then R>
//   checksum <16 hex digits>       (FNV-1a over every preceding byte)
struct ModelMeta {
    TaskKind task = TaskKind::LeastSquares;
    std::uint64_t seed = 0;
    StepSizeSchedule schedule;
    RegKind reg = RegKind::None;
    double mu = 0.0;
    std::uint32_t epochs = 0;
};

void save_model(const Model& model, const ModelMeta& meta, const std::string& path);

struct LoadedModel {
    Model model;
    ModelMeta meta;
};

/// Errors on unknown magic/version, malformed fields, or checksum mismatch
/// (truncation). Round-trips save_model output bit-exactly.
LoadedModel load_model(const std::string& path);

}  // namespace bismarck

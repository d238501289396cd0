#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sse/input_model.hpp"
#include "sse/sse_model.hpp"

namespace sse {

// Parsed run configuration. File layout (see docs/FORMATS.md):
//
//   # comment
//   [input]
//   x1 = uniform 0 1          # family and its two declared numbers
//   [sse]
//   p_max_local = 4
//   q_grid = 0.5 0.6 0.7 0.8
//   rank = 2
//   n_min = 0                 # 0 = min(5 M, 50)
//   max_level = -1            # -1 = floor(log2(N / n_min))
//   seed = 1
//   [benchmark]
//   case = 1d
//   sizes = 10 50 100 200
//   replications = 10
//   n_val = 100000
//   [io]
//   design = design.csv
//   model = model.json
//   points = points.csv
//   output = out.csv
//
// Unknown sections and keys are errors.
struct RunConfig {
  std::optional<InputModel> input;
  SseConfig sse;
  bool seed_set = false;

  std::string bench_case;
  std::vector<std::size_t> sizes;
  std::size_t replications = 0;
  std::size_t n_val = 0;

  std::string design_path;
  std::string model_path;
  std::string points_path;
  std::string output_path;
};

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

} // namespace sse

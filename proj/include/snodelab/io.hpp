#pragma once

// JSON specs, scenarios and reports; trajectory CSV.
//
// Matrices are arrays of rows; an entry is a number or [re, im].

#include <filesystem>
#include <string>
#include <variant>

#include <json.hpp>

#include "snodelab/asymptotics.hpp"
#include "snodelab/density.hpp"
#include "snodelab/hankel.hpp"
#include "snodelab/snode.hpp"
#include "snodelab/toeplitz.hpp"

namespace snodelab::io {

using Json = nlohmann::json;

Json matrix_to_json(const CMatrix& m);
/// Throws BadInput on ragged or non-numeric input.
CMatrix matrix_from_json(const Json& j);
Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

Json to_json(const ToeplitzSpec& spec);
Json to_json(const HankelSpec& spec);
Json to_json(const SNode& node);
ToeplitzSpec toeplitz_from_json(const Json& j);
HankelSpec hankel_from_json(const Json& j);
SNode snode_from_json(const Json& j);

using AnySpec = std::variant<ToeplitzSpec, HankelSpec, SNode>;

/// Chooses the kind by key: "s" Toeplitz, "H" Hankel, "A" generic node.
AnySpec spec_from_json(const Json& j);

/// Throws IoError when the file is missing or unreadable, BadInput on bad JSON.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"name": "uniform", "a": -1, "b": 1} | {"name": "cauchy", "tau": 1} |
/// {"name": "exp_sqrt"} | {"name": "table", "t": [...], "values": [...]}.
DensityFn density_from_json(const Json& j);

struct Scenario {
  std::string family = "hankel";
  /// Hankel family from a density.
  Json density;
  /// Family from an explicit spec (Toeplitz, or Hankel moments).
  Json spec;
  Complex lambda{0.0, 1.0};
  Index max_order = 4;
};

/// {"family": "hankel"|"toeplitz", "density": {...} | "spec": {...},
///  "lambda": [re, im], "max_order": n}.
Scenario scenario_from_json(const Json& j);

Json ball_to_json(const MatrixBall& ball);

/// Header: k, rhoinv_re_i_j..., rhoinv_im_i_j..., det_rhoinv, target, gap, cond
/// (i, j 1-based, row-major). Missing target/gap are empty fields.
std::string trajectory_csv_header(Index p);
std::string trajectory_csv(const TrajectoryReport& report);
void export_csv(const TrajectoryReport& report, const std::filesystem::path& path);

/// %.17g.
std::string format_number(double v);

}  // namespace snodelab::io

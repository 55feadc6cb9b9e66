#pragma once

#include "kmc/module.hpp"
#include "kmc/transport.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kmc {

/// Everything a verification run needs; serializable so runs can be replayed.
struct RunConfig {
    std::string gcm = "A2";          // preset name, or path to a json file with {"rows": [[..]]}
    std::vector<int> hw = {1, 1};    // highest weight in fundamental coordinates
    int depth = -1;                  // principal-grading truncation, -1 for the full irrep
    std::string module_file;         // optional serialized module bundle, overrides gcm/hw/depth
    std::vector<Cplx> h_values = {Cplx(0.1, 0.0)};
    double tol = 1e-6;               // generic comparison tolerance
    double transport_tol = 1e-10;    // adaptive integrator tolerance
    int dcp_degree = 6;              // truncation degree of the graded series
    unsigned seed = 1;               // fixes every random sample the suites draw
    std::vector<std::string> suites;
    std::string output_dir;          // empty: nothing is persisted
    bool write_csv = false;          // also dump eigenvalue trajectories over h
};

/// Throws invalid_argument on nonpositive tolerances or unknown suite names.
void validate_config(const RunConfig& c);

/// "0.1", "-2", "0.1+0.05i", "0.1-0.05i", "2i".
Cplx parse_complex(const std::string& s);

nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

/// Resolve the gcm field: preset name or json file.
GCM load_gcm(const std::string& source);

struct CheckRecord {
    std::string id;          // stable dotted identifier, e.g. "flatness.class.0"
    double residual = 0.0;   // 0.0 for exact checks that hold
    double tol = 0.0;        // 0.0 marks an exact check
    bool pass = false;
    std::string detail;
};

struct Report {
    int schema = 1;
    std::string suites;      // comma-joined selection, in execution order
    std::string environment; // compiler / platform fingerprint
    std::string config_hash; // fnv1a of the canonical config serialization
    std::string matrix_hash; // fnv1a of every persisted matrix payload
    std::string timestamp;
    std::vector<CheckRecord> checks;
    bool pass = true;
};

std::uint64_t fnv1a(const std::string& bytes);
std::string environment_fingerprint();

/// Run the selected suites; throws invalid_argument for config problems,
/// runtime_error when a computation cannot be carried out.
Report run_suite(const RunConfig& c);

nlohmann::json report_to_json(const Report& r);

/// One row per h value: monodromy eigenvalues of the corrected rank-one
/// generator. Requires a rank-one gcm.
std::string eigenvalue_trajectory_csv(const RunConfig& c);

}  // namespace kmc

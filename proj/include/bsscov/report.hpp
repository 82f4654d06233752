#ifndef BSSCOV_REPORT_HPP
#define BSSCOV_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace bsscov {

/// One empirical-vs-theoretical comparison. `provenance` names the limit
/// theorem the target came from plus a hash of the target formula, so a
/// report line can always be traced to its source.
struct CheckRecord {
    std::string name;
    double empirical = 0.0;
    double target = 0.0;
    double se = 0.0; // 0 for exact/deterministic checks
    double z = 0.0;
    bool pass = false;
    std::string provenance;
};

struct ExperimentReport {
    std::string kind;
    nlohmann::json config_echo;
    std::vector<CheckRecord> records;
    std::string environment;
    double wall_ms = 0.0;

    bool all_pass() const;
    /// canonical = true drops volatile fields (wall time); the canonical
    /// serialization is the byte-identity object of the determinism check.
    nlohmann::json to_json(bool canonical = true) const;
};

std::string environment_fingerprint();
std::string formula_hash(const std::string& formula); // FNV-1a, 16 hex digits

CheckRecord make_z_check(const std::string& name, double empirical, double target,
                         double se, double se_mult, const std::string& theorem,
                         const std::string& formula);
CheckRecord make_exact_check(const std::string& name, bool pass, double value,
                             double target, const std::string& theorem,
                             const std::string& formula);

/// Writes <stem>.report.json (canonical), <stem>.table.txt,
/// <stem>.plotdata.csv and <stem>.timing.json under out_dir.
void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir,
                 const std::string& stem);

} // namespace bsscov

#endif

#include "bsscov/report.hpp"
#include "bsscov/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace bsscov {

bool ExperimentReport::all_pass() const {
    for (const auto& r : records)
        if (!r.pass) return false;
    return true;
}

nlohmann::json ExperimentReport::to_json(bool canonical) const {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records)
        recs.push_back({{"name", r.name},
                        {"empirical", r.empirical},
                        {"target", r.target},
                        {"se", r.se},
                        {"z", r.z},
                        {"pass", r.pass},
                        {"provenance", r.provenance}});
    nlohmann::json j{{"kind", kind},
                     {"config", config_echo},
                     {"records", recs},
                     {"environment", environment},
                     {"all_pass", all_pass()}};
    if (!canonical) j["wall_ms"] = wall_ms;
    return j;
}

std::string environment_fingerprint() {
    std::ostringstream os;
    os << "gcc-" << __GNUC__ << "." << __GNUC_MINOR__ << "/eigen-" << EIGEN_WORLD_VERSION
       << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION << "/"
#ifdef NDEBUG
       << "release";
#else
       << "debug";
#endif
    return os.str();
}

std::string formula_hash(const std::string& formula) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : formula) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

CheckRecord make_z_check(const std::string& name, double empirical, double target,
                         double se, double se_mult, const std::string& theorem,
                         const std::string& formula) {
    CheckRecord r;
    r.name = name;
    r.empirical = empirical;
    r.target = target;
    r.se = se;
    r.z = se > 0.0 ? (empirical - target) / se : (empirical == target ? 0.0 : INFINITY);
    r.pass = std::abs(r.z) <= se_mult;
    r.provenance = theorem + "#" + formula_hash(formula);
    return r;
}

CheckRecord make_exact_check(const std::string& name, bool pass, double value,
                             double target, const std::string& theorem,
                             const std::string& formula) {
    CheckRecord r;
    r.name = name;
    r.empirical = value;
    r.target = target;
    r.se = 0.0;
    r.z = 0.0;
    r.pass = pass;
    r.provenance = theorem + "#" + formula_hash(formula);
    return r;
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir,
                 const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream f(out_dir / (stem + ".report.json"));
        if (!f) throw SchemaError("emit_report: cannot write report");
        f << report.to_json(true).dump(2) << "\n";
    }
    {
        std::ofstream f(out_dir / (stem + ".timing.json"));
        f << nlohmann::json{{"wall_ms", report.wall_ms}}.dump(2) << "\n";
    }
    {
        std::ofstream f(out_dir / (stem + ".table.txt"));
        f << std::left << std::setw(48) << "check" << std::setw(15) << "empirical"
          << std::setw(15) << "target" << std::setw(12) << "se" << std::setw(9) << "z"
          << "verdict\n";
        for (const auto& r : report.records) {
            std::ostringstream e, t, s, z;
            e << std::setprecision(6) << r.empirical;
            t << std::setprecision(6) << r.target;
            s << std::setprecision(3) << r.se;
            z << std::setprecision(3) << r.z;
            f << std::left << std::setw(48) << r.name << std::setw(15) << e.str()
              << std::setw(15) << t.str() << std::setw(12) << s.str() << std::setw(9)
              << z.str() << (r.pass ? "pass" : "FAIL") << "\n";
        }
    }
    {
        std::ofstream f(out_dir / (stem + ".plotdata.csv"));
        f << "check,empirical,target,band\n";
        f.precision(17);
        for (const auto& r : report.records)
            f << '"' << r.name << '"' << ',' << r.empirical << ',' << r.target << ','
              << r.se << "\n";
    }
}

} // namespace bsscov

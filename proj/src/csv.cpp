#include "bsscov/csv.hpp"
#include "bsscov/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace bsscov {

void export_paths(const PathBundle& bundle, const std::filesystem::path& file) {
    const Eigen::MatrixXd lv = bundle.levels();
    std::ofstream out(file);
    if (!out) throw SchemaError("export_paths: cannot open " + file.string());
    out.precision(17);
    out << "time";
    for (const auto& lab : bundle.labels) out << "," << lab;
    out << "\n";
    const double dt = bundle.grid.dt();
    for (long i = 0; i < lv.rows(); ++i) {
        out << static_cast<double>(i) * dt;
        for (long c = 0; c < lv.cols(); ++c) out << "," << lv(i, c);
        out << "\n";
    }
    nlohmann::json meta{{"n", bundle.grid.n},
                        {"T", bundle.grid.T},
                        {"warmup", bundle.meta.warmup},
                        {"seed", bundle.meta.seed},
                        {"path_index", bundle.meta.path_index},
                        {"regime", bundle.meta.regime},
                        {"scheme", bundle.meta.scheme},
                        {"volatility", bundle.meta.volatility_id},
                        {"drift", bundle.meta.drift_id}};
    std::ofstream ms(file.string() + ".meta.json");
    ms << meta.dump(2) << "\n";
}

PathBundle ingest_paths(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw SchemaError("ingest_paths: cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw SchemaError("ingest_paths: empty file " + file.string());
    std::vector<std::string> labels;
    {
        std::stringstream ss(line);
        std::string cell;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first) {
                if (cell != "time")
                    throw SchemaError("ingest_paths: header must start with 'time'");
                first = false;
            } else {
                labels.push_back(cell);
            }
        }
        if (labels.empty()) throw SchemaError("ingest_paths: no components in header");
    }
    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        long col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument("trailing");
                if (!std::isfinite(v))
                    throw SchemaError("ingest_paths: non-finite cell at row " +
                                      std::to_string(lineno) + ", column " +
                                      std::to_string(col));
                row.push_back(v);
            } catch (const SchemaError&) {
                throw;
            } catch (const std::exception&) {
                throw SchemaError("ingest_paths: unparsable cell at row " +
                                  std::to_string(lineno) + ", column " +
                                  std::to_string(col));
            }
        }
        if (row.size() != labels.size() + 1)
            throw SchemaError("ingest_paths: row " + std::to_string(lineno) + " has " +
                              std::to_string(row.size()) + " cells, expected " +
                              std::to_string(labels.size() + 1));
        times.push_back(row.front());
        rows.push_back(std::vector<double>(row.begin() + 1, row.end()));
    }
    if (times.size() < 2) throw SchemaError("ingest_paths: need at least two rows");
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw NonUniformGrid("ingest_paths: times not strictly increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double step = times[i] - times[i - 1];
        if (!(step > 0.0))
            throw NonUniformGrid("ingest_paths: times not strictly increasing at row " +
                                 std::to_string(i + 2));
        if (std::abs(step - dt) > 1e-9 * std::max(std::abs(dt), 1.0))
            throw NonUniformGrid("ingest_paths: non-uniform spacing at row " +
                                 std::to_string(i + 2));
    }
    PathBundle b;
    const long N = static_cast<long>(times.size()) - 1;
    const long n = std::max<long>(1, std::lround(1.0 / dt));
    b.grid = GridSpec(static_cast<double>(N) / static_cast<double>(n), n, 0.0);
    b.kind = PathKind::Levels;
    b.labels = labels;
    b.values.resize(N + 1, static_cast<long>(labels.size()));
    for (long i = 0; i <= N; ++i)
        for (std::size_t c = 0; c < labels.size(); ++c)
            b.values(i, static_cast<long>(c)) = rows[static_cast<std::size_t>(i)][c];
    b.meta.regime = "ingested";
    b.meta.scheme = "data";
    return b;
}

} // namespace bsscov

#include "isid/io.hpp"

#include "isid/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace isid::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + ": expected an array of rows");
    if (j.empty()) return Matrix(0, 0);
    // A flat array of numbers is read as a column vector.
    if (j.front().is_number()) {
        Matrix v(static_cast<Eigen::Index>(j.size()), 1);
        for (size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_number()) throw ValidationError(what + ": non-numeric entry");
            v(static_cast<Eigen::Index>(i), 0) = j[i].get<double>();
        }
        return v;
    }
    const size_t cols = j.front().size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw ValidationError(what + ": ragged rows");
        for (size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) throw ValidationError(what + ": non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
        }
    }
    return m;
}

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const fs::path& path, int line) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw ValidationError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

void write_batch_csv(const fs::path& path, const RolloutBatch& batch) {
    std::ofstream out = open_out(path);
    out << "rollout,t";
    for (int i = 1; i <= batch.r; ++i) out << ",u_" << i;
    for (int i = 1; i <= batch.m; ++i) out << ",z_" << i;
    out << '\n';
    for (int n = 0; n < batch.size(); ++n) {
        const Rollout& ro = batch.rollouts[static_cast<size_t>(n)];
        for (int t = 0; t <= batch.horizon; ++t) {
            out << n << ',' << t;
            for (int i = 0; i < batch.r; ++i) {
                out << ',';
                if (t < batch.horizon) out << format_double(ro.inputs(i, t));
            }
            for (int i = 0; i < batch.m; ++i) out << ',' << format_double(ro.outputs(i, t));
            out << '\n';
        }
    }
}

void write_batch_metadata(const fs::path& path, const RolloutBatch& batch) {
    Json j;
    j["plant"] = batch.plant;
    j["rollouts"] = batch.size();
    j["horizon"] = batch.horizon;
    j["m"] = batch.m;
    j["r"] = batch.r;
    j["seed"] = batch.seed;
    j["nonzero_initial_conditions"] = batch.nonzero_initial_conditions;
    if (batch.noise) {
        j["noise"] = {{"process", matrix_to_json(batch.noise->process)},
                      {"measurement", matrix_to_json(batch.noise->measurement)}};
    } else {
        j["noise"] = nullptr;
    }
    write_json(path, j);
}

RolloutBatch read_batch(const fs::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ValidationError("cannot read batch " + csv_path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(csv_path.string() + ": empty file");
    const std::vector<std::string> header = split_csv(line);
    if (header.size() < 3 || header[0] != "rollout" || header[1] != "t") {
        throw ValidationError(csv_path.string() + ": header must start with rollout,t");
    }
    int r = 0;
    int m = 0;
    for (size_t k = 2; k < header.size(); ++k) {
        if (header[k].rfind("u_", 0) == 0 && m == 0) {
            ++r;
        } else if (header[k].rfind("z_", 0) == 0) {
            ++m;
        } else {
            throw ValidationError(csv_path.string() + ": unexpected column '" + header[k] + "'");
        }
    }
    if (m == 0) throw ValidationError(csv_path.string() + ": no output columns");

    struct Row {
        int rollout, t;
        std::vector<double> u, z;
        bool has_u;
    };
    std::vector<Row> rows;
    int lineno = 1;
    int max_rollout = -1;
    int max_t = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw ValidationError(csv_path.string() + ":" + std::to_string(lineno) + ": wrong column count");
        }
        Row row;
        row.rollout = static_cast<int>(parse_double(cells[0], csv_path, lineno));
        row.t = static_cast<int>(parse_double(cells[1], csv_path, lineno));
        row.has_u = r == 0 || !cells[2].empty();
        for (int i = 0; i < r; ++i) {
            row.u.push_back(row.has_u ? parse_double(cells[static_cast<size_t>(2 + i)], csv_path, lineno) : 0.0);
        }
        for (int i = 0; i < m; ++i) row.z.push_back(parse_double(cells[static_cast<size_t>(2 + r + i)], csv_path, lineno));
        max_rollout = std::max(max_rollout, row.rollout);
        max_t = std::max(max_t, row.t);
        rows.push_back(std::move(row));
    }
    if (max_rollout < 0 || max_t < 1) throw ValidationError(csv_path.string() + ": no data rows");

    RolloutBatch batch;
    batch.m = m;
    batch.r = r;
    batch.horizon = max_t;
    batch.rollouts.resize(static_cast<size_t>(max_rollout + 1));
    std::vector<int> seen(static_cast<size_t>(max_rollout + 1), 0);
    for (Rollout& ro : batch.rollouts) {
        ro.inputs = Matrix::Zero(r, max_t);
        ro.outputs = Matrix::Zero(m, max_t + 1);
    }
    for (const Row& row : rows) {
        if (row.rollout < 0 || row.t < 0) throw ValidationError(csv_path.string() + ": negative index");
        Rollout& ro = batch.rollouts[static_cast<size_t>(row.rollout)];
        for (int i = 0; i < m; ++i) ro.outputs(i, row.t) = row.z[static_cast<size_t>(i)];
        if (row.t < max_t) {
            if (!row.has_u) throw ValidationError(csv_path.string() + ": missing input at t = " + std::to_string(row.t));
            for (int i = 0; i < r; ++i) ro.inputs(i, row.t) = row.u[static_cast<size_t>(i)];
        }
        ++seen[static_cast<size_t>(row.rollout)];
    }
    for (size_t n = 0; n < seen.size(); ++n) {
        if (seen[n] != max_t + 1) {
            throw ValidationError(csv_path.string() + ": rollout " + std::to_string(n) + " has " +
                                  std::to_string(seen[n]) + " rows, expected " + std::to_string(max_t + 1));
        }
    }

    fs::path meta = csv_path;
    meta.replace_extension(".json");
    if (fs::exists(meta)) {
        const Json j = read_json(meta);
        batch.plant = j.value("plant", std::string{});
        batch.seed = j.value("seed", std::uint64_t{0});
        batch.nonzero_initial_conditions = j.value("nonzero_initial_conditions", false);
        if (j.contains("noise") && !j["noise"].is_null()) {
            NoiseSpec ns;
            ns.process = matrix_from_json(j["noise"]["process"], "noise.process");
            ns.measurement = matrix_from_json(j["noise"]["measurement"], "noise.measurement");
            batch.noise = ns;
        }
    }
    return batch;
}

Json arma_model_to_json(const TvArmaModel& model) {
    Json j;
    j["q"] = model.q;
    j["m"] = model.m;
    j["r"] = model.r;
    j["H"] = model.horizon;
    Json steps = Json::array();
    for (const ArmaCoefficients& c : model.coefficients) {
        steps.push_back({{"t", c.t},
                         {"alpha", matrix_to_json(c.alpha)},
                         {"beta", matrix_to_json(c.beta)},
                         {"residual_norm", c.residual_norm},
                         {"rank_used", c.rank_used}});
    }
    j["steps"] = std::move(steps);
    return j;
}

TvArmaModel arma_model_from_json(const Json& j) {
    TvArmaModel model;
    try {
        model.q = j.at("q").get<int>();
        model.m = j.at("m").get<int>();
        model.r = j.at("r").get<int>();
        model.horizon = j.at("H").get<int>();
        for (const Json& s : j.at("steps")) {
            ArmaCoefficients c;
            c.t = s.at("t").get<int>();
            c.q = model.q;
            c.alpha = matrix_from_json(s.at("alpha"), "alpha");
            c.beta = matrix_from_json(s.at("beta"), "beta");
            c.residual_norm = s.value("residual_norm", 0.0);
            c.rank_used = s.value("rank_used", 0);
            if (c.alpha.rows() != model.m || c.alpha.cols() != model.m * model.q ||
                c.beta.rows() != model.m || c.beta.cols() != model.r * model.q) {
                throw ValidationError("ARMA model: coefficient shapes at t = " + std::to_string(c.t));
            }
            model.coefficients.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("ARMA model: ") + e.what());
    }
    return model;
}

Json info_state_model_to_json(const InfoStateModel& model) {
    Json j;
    j["q"] = model.q();
    j["m"] = model.m();
    j["r"] = model.r();
    j["t_range"] = {model.steps().front().t, model.steps().back().t};
    Json steps = Json::array();
    for (const InfoStateStep& s : model.steps()) {
        steps.push_back({{"t", s.t}, {"A", matrix_to_json(s.a)}, {"B", matrix_to_json(s.b)}});
    }
    j["steps"] = std::move(steps);
    return j;
}

void write_markov_csv(const fs::path& path, const std::vector<Matrix>& markov) {
    std::ofstream out = open_out(path);
    out << 'k';
    if (!markov.empty()) {
        for (Eigen::Index i = 0; i < markov.front().rows(); ++i) {
            for (Eigen::Index j = 0; j < markov.front().cols(); ++j) out << ",Y_" << i + 1 << '_' << j + 1;
        }
    }
    out << '\n';
    for (size_t k = 0; k < markov.size(); ++k) {
        out << k;
        for (Eigen::Index i = 0; i < markov[k].rows(); ++i) {
            for (Eigen::Index j = 0; j < markov[k].cols(); ++j) out << ',' << format_double(markov[k](i, j));
        }
        out << '\n';
    }
}

void write_noise_report(const fs::path& path, const std::vector<NoiseReportRow>& rows) {
    std::ofstream out = open_out(path);
    out << "t,N,rel_pred_error_corrected,rel_pred_error_uncorrected\n";
    for (const NoiseReportRow& r : rows) {
        out << r.t << ',' << r.samples << ',' << format_double(r.corrected) << ','
            << format_double(r.uncorrected) << '\n';
    }
}

void write_equivalence_csv(const fs::path& path, const EquivalenceReport& rep) {
    std::ofstream out = open_out(path);
    out << "t,u_diff_relnorm,z_diff_relnorm\n";
    for (size_t k = 0; k < rep.z_diff.size(); ++k) {
        out << rep.first_step + static_cast<int>(k) << ',';
        if (k < rep.u_diff.size()) out << format_double(rep.u_diff[k]);
        out << ',' << format_double(rep.z_diff[k]) << '\n';
    }
}

Json equivalence_summary(const EquivalenceReport& rep) {
    Json j;
    j["cost_true"] = rep.cost_true;
    j["cost_infostate"] = rep.cost_infostate;
    j["rel_gap"] = rep.rel_gap;
    j["max_u_diff_relnorm"] = rep.max_u_diff();
    j["max_z_diff_relnorm"] = rep.max_z_diff();
    return j;
}

void write_mismatch_csv(const fs::path& path, const MismatchReport& rep) {
    std::ofstream out = open_out(path);
    out << "k,err_openloop_Y,err_observer_Ybar\n";
    for (size_t k = 0; k < rep.err_openloop.size(); ++k) {
        out << k << ',' << format_double(rep.err_openloop[k]) << ',' << format_double(rep.err_observer[k])
            << '\n';
    }
}

namespace {

std::vector<Matrix> matrix_sequence(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ValidationError("plant file: '" + what + "' must be a non-empty array");
    // A sequence is an array whose entries are themselves arrays of rows.
    const bool is_sequence = j.front().is_array() && !j.front().empty() && j.front().front().is_array();
    std::vector<Matrix> out;
    if (is_sequence) {
        for (const Json& e : j) out.push_back(matrix_from_json(e, what));
    } else {
        out.push_back(matrix_from_json(j, what));
    }
    return out;
}

}  // namespace

LtvSystem load_plant_json(const fs::path& path) {
    const Json j = read_json(path);
    static const char* allowed[] = {"name", "A", "B", "C", "horizon"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(std::begin(allowed), std::end(allowed), key) == std::end(allowed)) {
            throw ValidationError("plant file: unknown key '" + key + "'");
        }
    }
    for (const char* key : {"A", "B", "C"}) {
        if (!j.contains(key)) throw ValidationError(std::string("plant file: missing '") + key + "'");
    }
    const std::string name = j.value("name", path.stem().string());
    std::vector<Matrix> a = matrix_sequence(j["A"], "A");
    std::vector<Matrix> b = matrix_sequence(j["B"], "B");
    std::vector<Matrix> c = matrix_sequence(j["C"], "C");
    if (a.size() == 1 && b.size() == 1 && c.size() == 1) {
        if (!j.contains("horizon")) throw ValidationError("plant file: time-invariant plant needs 'horizon'");
        return LtvSystem::time_invariant(name, a[0], b[0], c[0], j["horizon"].get<int>());
    }
    LtvSystem sys = LtvSystem::time_varying(name, std::move(a), std::move(b), std::move(c));
    if (j.contains("horizon") && j["horizon"].get<int>() != sys.horizon()) {
        throw ValidationError("plant file: 'horizon' disagrees with the sequence lengths");
    }
    return sys;
}

void write_json(const fs::path& path, const Json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out = open_out(path);
    out << text;
}

}  // namespace isid::io

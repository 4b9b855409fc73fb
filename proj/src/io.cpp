#include "qcompress/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qcompress/errors.hpp"

namespace qcompress {

using nlohmann::json;

namespace {

json table(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json complex_entry(const cmat& m) { return json{{"re", table(m.real())}, {"im", table(m.imag())}}; }

Eigen::MatrixXd read_table(const json& j, int rows, int cols, const std::string& what) {
    if (!j.is_array() || int(j.size()) != rows) throw ParseError(what + ": expected " + std::to_string(rows) + " rows");
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || int(row.size()) != cols)
            throw ParseError(what + ": row " + std::to_string(i) + " should have " + std::to_string(cols) + " entries");
        for (int k = 0; k < cols; ++k) {
            if (!row[k].is_number()) throw ParseError(what + ": non-numeric entry");
            m(i, k) = row[k].get<double>();
        }
    }
    if (!m.allFinite()) throw ParseError(what + ": non-finite entry");
    return m;
}

cmat read_complex(const json& j, int rows, int cols, const std::string& what) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im")) throw ParseError(what + ": needs re and im tables");
    cmat m(rows, cols);
    m.real() = read_table(j["re"], rows, cols, what + ".re");
    m.imag() = read_table(j["im"], rows, cols, what + ".im");
    return m;
}

int read_count(const json& j, const char* key, int lo) {
    if (!j.contains(key) || !j[key].is_number_integer()) throw ParseError(std::string("missing integer field ") + key);
    const long v = j[key].get<long>();
    if (v < lo || v > 1 << 20) throw ParseError(std::string("field out of range: ") + key);
    return int(v);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

void check_version(const json& j) {
    if (!j.is_object() || !j.contains("format_version") || !j["format_version"].is_string())
        throw ParseError("missing format_version");
    if (j["format_version"].get<std::string>() != kFormatVersion)
        throw ParseError("unsupported format_version " + j["format_version"].get<std::string>());
}

json channel_json(const QuantumChannel& ch) {
    json k = json::array();
    for (const auto& m : ch.kraus) k.push_back(complex_entry(m));
    return json{{"dim_in", ch.dim_in}, {"dim_out", ch.dim_out}, {"classical", ch.classical}, {"kraus", k}};
}

QuantumChannel read_channel(const json& j, const char* what) {
    if (!j.is_object()) throw ParseError(std::string(what) + " must be an object");
    QuantumChannel ch;
    ch.dim_in = read_count(j, "dim_in", 1);
    ch.dim_out = read_count(j, "dim_out", 1);
    ch.classical = read_count(j, "classical", 1);
    if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty())
        throw ParseError(std::string(what) + ": kraus must be a non-empty list");
    for (const auto& k : j["kraus"])
        ch.kraus.push_back(read_complex(k, ch.output_size(), ch.dim_in, std::string(what) + ".kraus"));
    return ch;
}

}  // namespace

std::string observable_file_json(const Fixture& f) {
    json ops = json::array();
    for (std::size_t i = 0; i < f.ops.size(); ++i) {
        json e = complex_entry(f.ops[i]);
        e["name"] = i < f.labels.size() ? f.labels[i] : "E" + std::to_string(i + 1);
        ops.push_back(std::move(e));
    }
    json j{{"format_version", kFormatVersion}, {"dim", f.dim}, {"operators", ops}};
    return j.dump(2) + "\n";
}

Fixture parse_observable_file(const std::string& text, const Tolerances& tol) {
    const json j = parse_json(text);
    check_version(j);
    Fixture f;
    f.dim = read_count(j, "dim", 1);
    if (!j.contains("operators") || !j["operators"].is_array() || j["operators"].empty())
        throw ParseError("operators must be a non-empty list");
    for (const auto& op : j["operators"]) {
        const std::string name = op.contains("name") && op["name"].is_string() ? op["name"].get<std::string>()
                                                                              : "E" + std::to_string(f.ops.size() + 1);
        const cmat m = read_complex(op, f.dim, f.dim, "operator " + name);
        const double scale = std::max(1.0, max_abs(m));
        if (max_abs(m - m.adjoint()) > tol.herm * scale)
            throw ParseError("operator " + name + " is not Hermitian (re symmetric, im antisymmetric)");
        f.labels.push_back(name);
        f.ops.push_back(hermitian_part(m));
    }
    f.name = "file";
    return f;
}

std::string scheme_json(const CompressionScheme& sc) {
    json j{{"format_version", kFormatVersion},
           {"dim", sc.compress.dim_in},
           {"d", sc.d},
           {"n", sc.n},
           {"kept_blocks", sc.kept_blocks},
           {"compress", channel_json(sc.compress)},
           {"decompress", channel_json(sc.decompress)}};
    return j.dump(2) + "\n";
}

CompressionScheme parse_scheme(const std::string& text) {
    const json j = parse_json(text);
    check_version(j);
    CompressionScheme sc;
    const int dim = read_count(j, "dim", 1);
    sc.d = read_count(j, "d", 1);
    sc.n = read_count(j, "n", 1);
    if (!j.contains("kept_blocks") || !j["kept_blocks"].is_array()) throw ParseError("missing kept_blocks");
    for (const auto& b : j["kept_blocks"]) {
        if (!b.is_number_integer()) throw ParseError("kept_blocks must hold integers");
        sc.kept_blocks.push_back(b.get<int>());
    }
    if (!j.contains("compress") || !j.contains("decompress")) throw ParseError("scheme needs compress and decompress");
    sc.compress = read_channel(j["compress"], "compress");
    sc.decompress = read_channel(j["decompress"], "decompress");
    if (sc.compress.dim_in != dim || sc.decompress.output_size() != dim)
        throw ParseError("scheme channels do not match dim");
    if (sc.compress.dim_out != sc.d || sc.compress.classical != sc.n || sc.decompress.dim_in != sc.d * sc.n)
        throw ParseError("scheme channels do not match d and n");
    return sc;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
    if (!out) throw ParseError("write failed for " + path);
}

}  // namespace qcompress

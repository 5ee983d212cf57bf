#include "qnetsyn/json_io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qnetsyn/errors.hpp"

namespace qnetsyn {

namespace {

constexpr int kFormatVersion = 1;

void require_format(const json& j, const std::string& format) {
    if (!j.is_object()) {
        throw SchemaError("document must be a JSON object");
    }
    const auto it = j.find("format");
    if (it == j.end() || !it->is_string() || it->get<std::string>() != format) {
        throw SchemaError("expected a document with \"format\": \"" + format + "\"");
    }
    const auto ver = j.find("version");
    if (ver == j.end() || !ver->is_number_integer() || ver->get<int>() != kFormatVersion) {
        throw SchemaError(format + ": unsupported or missing \"version\" (this build reads version " +
                          std::to_string(kFormatVersion) + ")");
    }
}

const json& require_field(const json& j, const std::string& key, const std::string& what) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(what + ": missing field \"" + key + "\"");
    }
    return *it;
}

double number_from_json(const json& j, const std::string& what) {
    if (!j.is_number()) {
        throw SchemaError(what + ": expected a number");
    }
    return j.get<double>();
}

Complex complex_from_json(const json& j, const std::string& what) {
    if (j.is_number()) {
        return Complex(j.get<double>(), 0.0);
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return Complex(j[0].get<double>(), j[1].get<double>());
    }
    throw SchemaError(what + ": complex entries must be [re, im] pairs or bare numbers");
}

json complex_to_json(const Complex& z) {
    return json::array({z.real(), z.imag()});
}

std::vector<Port> ports_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) {
        throw SchemaError(what + ": expected an array of ports");
    }
    std::vector<Port> ports;
    for (const auto& entry : j) {
        if (!entry.is_object()) {
            throw SchemaError(what + ": each port must be an object");
        }
        Port p;
        p.label = require_field(entry, "label", what).get<std::string>();
        p.multiplicity = require_field(entry, "multiplicity", what).get<int>();
        ports.push_back(std::move(p));
    }
    return ports;
}

json ports_to_json(const std::vector<Port>& ports) {
    json out = json::array();
    for (const auto& p : ports) {
        out.push_back({{"label", p.label}, {"multiplicity", p.multiplicity}});
    }
    return out;
}

void canonical_dump_impl(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::null:
            out += "null";
            return;
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            return;
        case json::value_t::number_integer:
        case json::value_t::number_unsigned:
            out += j.dump();
            return;
        case json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                throw SchemaError("canonical_dump: non-finite number");
            }
            if (v == 0.0) {
                v = 0.0;  // normalize -0
            }
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out += buf;
            return;
        }
        case json::value_t::string:
            out += json(j.get<std::string>()).dump();
            return;
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& item : j) {
                if (!first) {
                    out += ',';
                }
                first = false;
                canonical_dump_impl(item, out);
            }
            out += ']';
            return;
        }
        case json::value_t::object: {
            // nlohmann objects iterate in key order already
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ',';
                }
                first = false;
                out += json(it.key()).dump();
                out += ':';
                canonical_dump_impl(it.value(), out);
            }
            out += '}';
            return;
        }
        default:
            throw SchemaError("canonical_dump: unsupported JSON value type");
    }
}

} // namespace

json cmat_to_json(const CMat& a) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            row.push_back(complex_to_json(a(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json rmat_to_json(const RMat& a) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            row.push_back(a(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CMat cmat_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) {
        throw SchemaError(what + ": expected nested row arrays");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    for (const auto& row : j) {
        if (!row.is_array()) {
            throw SchemaError(what + ": expected nested row arrays");
        }
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
        } else if (cols != static_cast<Eigen::Index>(row.size())) {
            throw SchemaError(what + ": rows have unequal length");
        }
    }
    if (cols < 0) {
        cols = 0;
    }
    CMat out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            out(r, c) = complex_from_json(j[r][c], what);
        }
    }
    return out;
}

RMat rmat_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) {
        throw SchemaError(what + ": expected nested row arrays");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    for (const auto& row : j) {
        if (!row.is_array()) {
            throw SchemaError(what + ": expected nested row arrays");
        }
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
        } else if (cols != static_cast<Eigen::Index>(row.size())) {
            throw SchemaError(what + ": rows have unequal length");
        }
    }
    if (cols < 0) {
        cols = 0;
    }
    RMat out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            out(r, c) = number_from_json(j[r][c], what);
        }
    }
    return out;
}

json system_to_json(const SystemParams& g) {
    json doc;
    doc["format"] = "qnetsyn.system_params";
    doc["version"] = kFormatVersion;
    doc["n_dof"] = g.n_dof;
    doc["m"] = g.m;
    doc["S"] = cmat_to_json(g.S);
    doc["K"] = cmat_to_json(g.K);
    doc["R"] = rmat_to_json(g.R);
    doc["out_ports"] = ports_to_json(g.out_ports);
    doc["in_ports"] = ports_to_json(g.in_ports);
    return doc;
}

SystemParams system_from_json(const json& j) {
    require_format(j, "qnetsyn.system_params");
    const std::string what = "system_params";
    const int n_dof = require_field(j, "n_dof", what).get<int>();
    CMat s = cmat_from_json(require_field(j, "S", what), what + ".S");
    CMat k = cmat_from_json(require_field(j, "K", what), what + ".K");
    RMat r = rmat_from_json(require_field(j, "R", what), what + ".R");

    if (j.contains("m") && j.at("m").get<int>() != static_cast<int>(s.rows())) {
        throw SchemaError(what + ": field \"m\" disagrees with the shape of S");
    }
    if (k.cols() != 2 * n_dof) {
        throw SchemaError(what + ": K must have 2*n_dof columns");
    }

    try {
        if (j.contains("out_ports") || j.contains("in_ports")) {
            auto outs = ports_from_json(require_field(j, "out_ports", what), what + ".out_ports");
            auto ins = ports_from_json(require_field(j, "in_ports", what), what + ".in_ports");
            return SystemParams::make(std::move(s), std::move(k), r,
                                      std::move(outs), std::move(ins));
        }
        return SystemParams::make(std::move(s), std::move(k), r);
    } catch (const DimensionError& e) {
        throw SchemaError(what + ": " + e.what());
    }
}

json model_to_json(const ModelMatrix& m) {
    json doc;
    doc["format"] = "qnetsyn.model_matrix";
    doc["version"] = kFormatVersion;
    doc["system"] = system_to_json(m.params);
    doc["row_groups"] = m.row_groups;
    doc["col_groups"] = m.col_groups;
    return doc;
}

ModelMatrix model_from_json(const json& j) {
    require_format(j, "qnetsyn.model_matrix");
    ModelMatrix m = build_model(system_from_json(require_field(j, "system", "model_matrix")));
    if (j.contains("row_groups")) {
        m.row_groups = j.at("row_groups").get<std::vector<std::string>>();
    }
    if (j.contains("col_groups")) {
        m.col_groups = j.at("col_groups").get<std::vector<std::string>>();
    }
    if (m.row_groups.size() != m.params.out_ports.size() ||
        m.col_groups.size() != m.params.in_ports.size()) {
        throw SchemaError("model_matrix: group tags do not match the port partition");
    }
    return m;
}

ModelMatrix model_or_system_from_json(const json& j) {
    if (j.is_object() && j.contains("format") && j.at("format") == "qnetsyn.system_params") {
        return build_model(system_from_json(j));
    }
    return model_from_json(j);
}

json netlist_to_json(const SynthesisNetlist& netlist) {
    json doc;
    doc["format"] = "qnetsyn.netlist";
    doc["version"] = kFormatVersion;
    doc["n_dof"] = netlist.n_dof;
    doc["m"] = netlist.m;
    doc["passive"] = netlist.passive;
    doc["target_hash"] = netlist.target_hash;

    json oscillators = json::array();
    for (const auto& block : netlist.oscillators) {
        json couplings = json::array();
        for (const auto& part : block.couplings) {
            couplings.push_back({{"S", cmat_to_json(part.S)}, {"K", cmat_to_json(part.K)}});
        }
        oscillators.push_back({{"index", block.index},
                               {"R", rmat_to_json(block.R)},
                               {"couplings", std::move(couplings)}});
    }
    doc["oscillators"] = std::move(oscillators);

    const auto edges_json = [](const std::vector<Edge>& edges) {
        json out = json::array();
        for (const auto& e : edges) {
            out.push_back({{"out", e.out_label}, {"in", e.in_label}});
        }
        return out;
    };
    doc["interaction_edges"] = edges_json(netlist.interaction_edges);
    doc["cascade_edges"] = edges_json(netlist.cascade_edges);
    return doc;
}

SynthesisNetlist netlist_from_json(const json& j) {
    require_format(j, "qnetsyn.netlist");
    const std::string what = "netlist";

    SynthesisNetlist netlist;
    netlist.n_dof = require_field(j, "n_dof", what).get<int>();
    netlist.m = require_field(j, "m", what).get<int>();
    netlist.passive = j.value("passive", false);
    netlist.target_hash = require_field(j, "target_hash", what).get<std::string>();

    const json& oscillators = require_field(j, "oscillators", what);
    if (!oscillators.is_array() || static_cast<int>(oscillators.size()) != netlist.n_dof) {
        throw SchemaError(what + ": expected n_dof oscillator blocks");
    }
    for (const auto& entry : oscillators) {
        OscillatorBlock block;
        block.index = require_field(entry, "index", what).get<int>();
        block.R = rmat_from_json(require_field(entry, "R", what), what + ".R");
        if (block.R.rows() != 2 || block.R.cols() != 2) {
            throw SchemaError(what + ": oscillator R blocks must be 2 x 2");
        }
        const json& couplings = require_field(entry, "couplings", what);
        if (!couplings.is_array() || static_cast<int>(couplings.size()) != netlist.n_dof) {
            throw SchemaError(what + ": each oscillator carries n_dof coupling blocks");
        }
        for (const auto& part : couplings) {
            OscillatorBlock::Coupling c;
            c.S = cmat_from_json(require_field(part, "S", what), what + ".S");
            c.K = cmat_from_json(require_field(part, "K", what), what + ".K");
            if (c.S.rows() != c.S.cols() || c.K.rows() != c.S.rows() || c.K.cols() != 2) {
                throw SchemaError(what + ": coupling blocks must be c x c and c x 2");
            }
            block.couplings.push_back(std::move(c));
        }
        netlist.oscillators.push_back(std::move(block));
    }

    const auto edges_from = [&](const char* key) {
        std::vector<Edge> edges;
        const json& arr = require_field(j, key, what);
        if (!arr.is_array()) {
            throw SchemaError(what + ": \"" + key + "\" must be an array");
        }
        for (const auto& e : arr) {
            edges.push_back({require_field(e, "out", what).get<std::string>(),
                             require_field(e, "in", what).get<std::string>()});
        }
        return edges;
    };
    netlist.interaction_edges = edges_from("interaction_edges");
    netlist.cascade_edges = edges_from("cascade_edges");
    return netlist;
}

json report_to_json(const VerificationReport& report) {
    json doc;
    doc["format"] = "qnetsyn.verification_report";
    doc["version"] = kFormatVersion;
    doc["target_hash"] = report.target_hash;
    doc["max_residual_S"] = report.max_residual_S;
    doc["max_residual_K"] = report.max_residual_K;
    doc["max_residual_R"] = report.max_residual_R;
    doc["max_residual_ABCD"] = report.max_residual_ABCD;
    doc["max_order_disagreement"] = report.max_order_disagreement;
    doc["elimination_orders_tested"] = report.elimination_orders_tested;
    doc["passed"] = report.passed;
    doc["tolerance"] = report.tolerance;
    doc["seed"] = report.seed;
    doc["notes"] = report.notes;
    return doc;
}

json qsde_to_json(const QsdeMatrices& q) {
    json doc;
    doc["format"] = "qnetsyn.qsde";
    doc["version"] = kFormatVersion;
    doc["A"] = rmat_to_json(q.A);
    doc["B"] = cmat_to_json(q.B);
    doc["C"] = cmat_to_json(q.C);
    doc["D"] = cmat_to_json(q.D);
    return doc;
}

std::string canonical_dump(const json& j) {
    std::string out;
    canonical_dump_impl(j, out);
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256: digest computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string system_digest(const SystemParams& g) {
    return sha256_hex(canonical_dump(system_to_json(g)));
}

json parse_json_text(const std::string& text, const std::string& what) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
        throw SchemaError(what + ": not valid JSON");
    }
    return parsed;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_json_text(buffer.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << text;
}

} // namespace qnetsyn

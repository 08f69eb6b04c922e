#include "gammachan/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gammachan {

namespace {

std::string num(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string pass_text(const std::optional<bool>& pass) {
    if (!pass.has_value()) return "null";
    return *pass ? "true" : "false";
}

}  // namespace

std::string to_string(IdentityId id) {
    switch (id) {
        case IdentityId::debruijn_gamma: return "DEBRUIJN_GAMMA";
        case IdentityId::debruijn_integrated: return "DEBRUIJN_INTEGRATED";
        case IdentityId::gsv_gamma: return "GSV_GAMMA";
        case IdentityId::bound_eq28: return "BOUND_EQ28";
        case IdentityId::bound1: return "BOUND1";
        case IdentityId::bound2: return "BOUND2";
        case IdentityId::bound_alpha_nu: return "BOUND_ALPHA_NU";
        case IdentityId::lower_half: return "LOWER_HALF";
        case IdentityId::asymptotic_half: return "ASYMPTOTIC_HALF";
        case IdentityId::gaussian_mi: return "GAUSSIAN_MI";
        case IdentityId::gaussian_mmse: return "GAUSSIAN_MMSE";
        case IdentityId::gaussian_gsv: return "GAUSSIAN_GSV";
        case IdentityId::gaussian_debruijn: return "GAUSSIAN_DEBRUIJN";
        case IdentityId::stein_gaussian: return "STEIN_GAUSSIAN";
        case IdentityId::stein_gamma: return "STEIN_GAMMA";
        case IdentityId::channel_ks: return "CHANNEL_KS";
        case IdentityId::channel_mgf: return "CHANNEL_MGF";
        case IdentityId::fisher_routes: return "FISHER_ROUTES";
        case IdentityId::explore_alpha: return "EXPLORE_ALPHA";
        case IdentityId::relent_flow: return "RELENT_FLOW";
    }
    throw std::logic_error("to_string: unhandled identity id");
}

IdentityId identity_from_string(const std::string& name) {
    static const std::map<std::string, IdentityId> lut = [] {
        std::map<std::string, IdentityId> m;
        for (int i = 0; i <= static_cast<int>(IdentityId::relent_flow); ++i) {
            const auto id = static_cast<IdentityId>(i);
            m.emplace(to_string(id), id);
        }
        return m;
    }();
    const auto it = lut.find(name);
    if (it == lut.end()) {
        throw std::invalid_argument("unknown identity id '" + name + "'");
    }
    return it->second;
}

bool RunReport::verdict_pass() const {
    for (const auto& row : rows) {
        if (row.pass.has_value() && !*row.pass) return false;
    }
    return true;
}

std::string to_csv(const std::vector<IdentityCheckRow>& rows) {
    std::string out = "identity_id,input_id,alpha,lambda,r,lhs,rhs,lhs_se,rhs_se,tolerance,pass\n";
    for (const auto& row : rows) {
        out += to_string(row.identity);
        out += ',' + row.input_id;
        out += ',' + num(row.alpha);
        out += ',' + num(row.lambda);
        out += ',' + num(row.r);
        out += ',' + num(row.lhs);
        out += ',' + num(row.rhs);
        out += ',' + num(row.lhs_se);
        out += ',' + num(row.rhs_se);
        out += ',' + num(row.tolerance);
        out += ',' + pass_text(row.pass);
        out += '\n';
    }
    return out;
}

std::string to_json(const RunReport& report) {
    std::string out = "{\n";
    out += "  \"metadata\": {\n";
    out += "    \"config_hash\": \"" + json_escape(report.config_hash) + "\",\n";
    out += "    \"code_version\": \"" + json_escape(report.code_version) + "\"\n";
    out += "  },\n";
    out += std::string("  \"verdict\": \"") + (report.verdict_pass() ? "pass" : "fail") + "\",\n";
    out += "  \"rows\": [";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        out += i ? ",\n    {" : "\n    {";
        out += "\"identity_id\": \"" + to_string(row.identity) + "\", ";
        out += "\"input_id\": \"" + json_escape(row.input_id) + "\", ";
        out += "\"alpha\": " + num(row.alpha) + ", ";
        out += "\"lambda\": " + num(row.lambda) + ", ";
        out += "\"r\": " + num(row.r) + ", ";
        out += "\"lhs\": " + num(row.lhs) + ", ";
        out += "\"rhs\": " + num(row.rhs) + ", ";
        out += "\"lhs_se\": " + num(row.lhs_se) + ", ";
        out += "\"rhs_se\": " + num(row.rhs_se) + ", ";
        out += "\"tolerance\": " + num(row.tolerance) + ", ";
        out += "\"pass\": " + pass_text(row.pass);
        out += "}";
    }
    out += report.rows.empty() ? "],\n" : "\n  ],\n";
    out += std::string("  \"row_count\": ") + std::to_string(report.rows.size()) + "\n";
    out += "}\n";
    return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

}  // namespace

void emit_csv(const std::vector<IdentityCheckRow>& rows, const std::string& path) {
    write_file(path, to_csv(rows));
}

void emit_json(const RunReport& report, const std::string& path) {
    write_file(path, to_json(report));
}

RunReport read_json_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    nlohmann::json j;
    in >> j;
    RunReport report;
    report.config_hash = j.at("metadata").at("config_hash").get<std::string>();
    report.code_version = j.at("metadata").at("code_version").get<std::string>();
    for (const auto& jr : j.at("rows")) {
        IdentityCheckRow row;
        row.identity = identity_from_string(jr.at("identity_id").get<std::string>());
        row.input_id = jr.at("input_id").get<std::string>();
        const auto field = [&](const char* k) {
            const auto& v = jr.at(k);
            return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
        };
        row.alpha = field("alpha");
        row.lambda = field("lambda");
        row.r = field("r");
        row.lhs = field("lhs");
        row.rhs = field("rhs");
        row.lhs_se = field("lhs_se");
        row.rhs_se = field("rhs_se");
        row.tolerance = field("tolerance");
        const auto& p = jr.at("pass");
        if (!p.is_null()) row.pass = p.get<bool>();
        report.rows.push_back(std::move(row));
    }
    return report;
}

void print_summary(const RunReport& report, std::FILE* stream) {
    std::map<std::string, std::pair<int, int>> tally;  // id -> {pass, total gated}
    std::map<std::string, double> wall;
    int exploratory = 0;
    for (const auto& row : report.rows) {
        const std::string id = to_string(row.identity);
        wall[id] += row.wall_ms;
        if (!row.pass.has_value()) {
            ++exploratory;
            continue;
        }
        auto& t = tally[id];
        t.first += *row.pass ? 1 : 0;
        t.second += 1;
    }
    std::fprintf(stream, "config %s, code %s\n", report.config_hash.c_str(),
                 report.code_version.c_str());
    for (const auto& [id, t] : tally) {
        std::fprintf(stream, "  %-22s %3d/%-3d pass  (%.0f ms)\n", id.c_str(), t.first,
                     t.second, wall[id]);
    }
    if (exploratory > 0) {
        std::fprintf(stream, "  %d exploratory rows (not gated)\n", exploratory);
    }
    std::fprintf(stream, "verdict: %s\n", report.verdict_pass() ? "pass" : "fail");
}

}  // namespace gammachan

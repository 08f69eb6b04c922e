#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "gammachan/estimates.hpp"

namespace gammachan {

inline constexpr const char* kCodeVersion = "0.1.0";

IdentityId identity_from_string(const std::string& name);

struct RunReport {
    std::vector<IdentityCheckRow> rows;
    std::string config_hash;
    std::string code_version = kCodeVersion;

    // exploratory rows (pass unset) never count against the verdict
    bool verdict_pass() const;
};

// serialized forms; every double rendered with 12 significant digits so a
// re-read report re-serializes byte-identically
std::string to_csv(const std::vector<IdentityCheckRow>& rows);
std::string to_json(const RunReport& report);

void emit_csv(const std::vector<IdentityCheckRow>& rows, const std::string& path);
void emit_json(const RunReport& report, const std::string& path);
RunReport read_json_report(const std::string& path);

// human-readable roll-up plus per-identity timing; timing stays off the files
void print_summary(const RunReport& report, std::FILE* stream);

}  // namespace gammachan

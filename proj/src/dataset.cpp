#include "dmlwb/dataset.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dmlwb/errors.hpp"

namespace dmlwb {

namespace roles {

std::string covariate(std::size_t j) { return "covariate_" + std::to_string(j); }
std::string truth_eta(std::size_t j) { return "truth_eta_" + std::to_string(j); }

namespace {
bool has_numeric_suffix(const std::string& role, const std::string& prefix) {
    if (role.size() <= prefix.size() || role.compare(0, prefix.size(), prefix) != 0)
        return false;
    const std::string tail = role.substr(prefix.size());
    if (tail.empty() || tail[0] == '0') return false;
    for (char ch : tail)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
}
}  // namespace

bool is_valid(const std::string& role) {
    return role == outcome || role == outcome_pre || role == treatment ||
           role == instrument || role == truth_theta ||
           has_numeric_suffix(role, "covariate_") ||
           has_numeric_suffix(role, "truth_eta_");
}

bool is_indicator(const std::string& role) {
    return role == treatment || role == instrument;
}

}  // namespace roles

Dataset Dataset::create(Columns columns, RoleMap role_map) {
    Dataset d;
    d.names_.reserve(columns.size());
    d.data_.reserve(columns.size());
    for (auto& [name, values] : columns) {
        if (d.index_.count(name))
            throw SchemaError("duplicate column name: " + name);
        d.index_[name] = d.names_.size();
        d.names_.push_back(name);
        d.data_.push_back(std::move(values));
    }
    d.roles_ = std::move(role_map);
    d.n_ = d.data_.empty() ? 0 : d.data_.front().size();
    d.d_x_ = 0;
    while (d.roles_.count(roles::covariate(d.d_x_ + 1))) ++d.d_x_;
    d.validate();
    return d;
}

void Dataset::validate() const {
    for (std::size_t c = 0; c < data_.size(); ++c) {
        if (data_[c].size() != n_)
            throw ValidationError("column '" + names_[c] + "' has length " +
                                  std::to_string(data_[c].size()) + ", expected " +
                                  std::to_string(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            if (!std::isfinite(data_[c][i]))
                throw ValidationError("column '" + names_[c] +
                                      "' has a non-finite value at row " +
                                      std::to_string(i + 1));
        }
    }
    std::set<std::string> seen_covariates;
    for (const auto& [role, col] : roles_) {
        if (!roles::is_valid(role))
            throw SchemaError("unknown role: " + role);
        auto it = index_.find(col);
        if (it == index_.end())
            throw SchemaError(col);
        if (roles::is_indicator(role)) {
            const auto& v = data_[it->second];
            for (std::size_t i = 0; i < n_; ++i) {
                if (v[i] != 0.0 && v[i] != 1.0)
                    throw ValidationError("role '" + role + "' (column '" + col +
                                          "') must be 0/1 but has value " +
                                          std::to_string(v[i]) + " at row " +
                                          std::to_string(i + 1));
            }
        }
        if (role.rfind("covariate_", 0) == 0) {
            if (!seen_covariates.insert(col).second)
                throw ValidationError("covariate roles must map to distinct columns ('" +
                                      col + "' reused)");
        }
    }
    // Covariate roles, when present, must be contiguous 1..d_x.
    for (const auto& [role, col] : roles_) {
        if (role.rfind("covariate_", 0) == 0) {
            std::size_t j = std::stoul(role.substr(10));
            if (j > d_x_)
                throw SchemaError("covariate roles must be contiguous; got " + role +
                                  " with covariate_" + std::to_string(j - 1) + " missing");
        }
    }
    if (d_x_ < 1)
        throw SchemaError("at least one covariate role (covariate_1) is required");
}

bool Dataset::has_column(const std::string& name) const {
    return index_.count(name) != 0;
}

bool Dataset::has_role(const std::string& role) const {
    return roles_.count(role) != 0;
}

const std::vector<double>& Dataset::column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw SchemaError(name);
    return data_[it->second];
}

const std::vector<double>& Dataset::by_role(const std::string& role) const {
    auto it = roles_.find(role);
    if (it == roles_.end()) throw SchemaError("no column bound to role '" + role + "'");
    return column(it->second);
}

Dataset Dataset::with_column(const std::string& name, std::vector<double> values) const {
    Columns cols;
    cols.reserve(names_.size() + 1);
    bool replaced = false;
    for (std::size_t c = 0; c < names_.size(); ++c) {
        if (names_[c] == name) {
            cols.emplace_back(name, values);
            replaced = true;
        } else {
            cols.emplace_back(names_[c], data_[c]);
        }
    }
    if (!replaced) cols.emplace_back(name, std::move(values));
    return create(std::move(cols), roles_);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    out.push_back(field);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const Dataset::RoleMap& role_map) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty file: " + path);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    std::vector<std::vector<double>> cols(header.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError("row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string f = trim(fields[c]);
            if (f.empty())
                throw ParseError("missing value at row " + std::to_string(row) +
                                 ", column '" + header[c] + "'");
            char* end = nullptr;
            double v = std::strtod(f.c_str(), &end);
            if (end != f.c_str() + f.size())
                throw ParseError("cannot parse '" + f + "' at row " + std::to_string(row) +
                                 ", column '" + header[c] + "'");
            cols[c].push_back(v);
        }
    }

    Dataset::Columns columns;
    for (std::size_t c = 0; c < header.size(); ++c)
        columns.emplace_back(header[c], std::move(cols[c]));

    // Auto-bind truth_* columns named exactly after their role.
    Dataset::RoleMap effective = role_map;
    for (const auto& h : header) {
        if (h.rfind("truth_", 0) == 0 && roles::is_valid(h) && !effective.count(h))
            effective[h] = h;
    }
    return Dataset::create(std::move(columns), std::move(effective));
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    const auto& names = data.column_names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c) out << ',';
        out << names[c];
    }
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (c) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", data.column(names[c])[i]);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace dmlwb

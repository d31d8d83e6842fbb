#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dmlwb {

// Semantic roles a column can play. Roles are plain strings:
//   outcome, outcome_pre, treatment, instrument,
//   covariate_1 .. covariate_d, truth_eta_1 .. truth_eta_p, truth_theta
namespace roles {
inline const std::string outcome = "outcome";
inline const std::string outcome_pre = "outcome_pre";
inline const std::string treatment = "treatment";
inline const std::string instrument = "instrument";
std::string covariate(std::size_t j);   // 1-based
std::string truth_eta(std::size_t j);   // 1-based
inline const std::string truth_theta = "truth_theta";
bool is_valid(const std::string& role);
bool is_indicator(const std::string& role);  // treatment or instrument
}  // namespace roles

// Immutable container of equally long numeric columns plus a role map.
// Construction validates the invariants; afterwards a Dataset is safe to
// share read-only across any number of workers.
class Dataset {
public:
    using Columns = std::vector<std::pair<std::string, std::vector<double>>>;
    using RoleMap = std::map<std::string, std::string>;  // role -> column name

    static Dataset create(Columns columns, RoleMap roles);

    std::size_t n_rows() const { return n_; }
    std::size_t d_x() const { return d_x_; }

    bool has_column(const std::string& name) const;
    bool has_role(const std::string& role) const;

    const std::vector<double>& column(const std::string& name) const;
    const std::vector<double>& by_role(const std::string& role) const;

    const std::vector<std::string>& column_names() const { return names_; }
    const RoleMap& roles() const { return roles_; }

    // Returns a copy with one column replaced (or appended). Used by tests
    // that need to perturb a single observation.
    Dataset with_column(const std::string& name, std::vector<double> values) const;

private:
    Dataset() = default;
    void validate() const;

    std::size_t n_ = 0;
    std::size_t d_x_ = 0;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> data_;
    std::map<std::string, std::size_t> index_;  // column name -> position
    RoleMap roles_;
};

// CSV ingestion: UTF-8, comma separated, header row, '.' decimal separator.
// Any column whose name coincides with a truth_* role is auto-bound to that
// role unless the role map overrides it.
Dataset load_csv(const std::string& path, const Dataset::RoleMap& role_map);

// Writes all columns with 17 significant digits so a reload reproduces the
// values exactly.
void write_csv(const Dataset& data, const std::string& path);

}  // namespace dmlwb

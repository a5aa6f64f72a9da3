#pragma once

#include <string>
#include <vector>

#include "prorl/classes.hpp"
#include "prorl/dataset.hpp"
#include "prorl/mdp.hpp"
#include "prorl/oracle.hpp"
#include "prorl/regularizer.hpp"
#include "prorl/saddle.hpp"

namespace prorl::io {

std::string read_file(const std::string& path);
// Creates parent directories as needed.
void write_file(const std::string& path, const std::string& contents);

// {"num_states","num_actions","gamma","transition":[s][a][s'],"reward":[s][a],"init_dist":[s]}
std::string mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const std::string& text);

// Accepts either the bare {"kind",...} object or a document holding it under "regularizer".
Regularizer regularizer_from_json(const std::string& text);
std::string regularizer_to_json(const Regularizer& reg);

// One {"s","a","r","sp"} object per line.
std::string transitions_to_jsonl(const OfflineDataset& data);
// One {"s0"} object per line.
std::string init_states_to_jsonl(const OfflineDataset& data);
OfflineDataset dataset_from_jsonl(const std::string& transitions, const std::string& init_states, int num_states,
                                  int num_actions, double gamma);

std::string occupancy_to_json(const Occupancy& occ);
Occupancy occupancy_from_json(const std::string& text);

std::string policy_to_json(const Policy& policy);
Policy policy_from_json(const std::string& text);

// {"values":{"bound","nonnegative","members"},"weights":{"bound","floor"?,"members"}}
std::string classes_to_json(const FunctionClasses& classes);
FunctionClasses classes_from_json(const std::string& text);

// {"policies":[...]}
std::string policy_class_to_json(const PolicyClass& policies);
PolicyClass policy_class_from_json(const std::string& text);

// {"alpha","v_star","w_star","pi_star","kkt_residual"} plus solver metadata.
std::string solution_to_json(const RegularizedSolution& solution);

std::string saddle_to_json(const SaddleSolution& solution);
// Reads the "w_hat" matrix of a saddle solution document.
Matrix weights_from_saddle_json(const std::string& text);

// Fixed-width decimal rendering used for every CSV cell.
std::string format_number(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    void add_row(std::vector<std::string> cells);
    std::string to_string() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace prorl::io

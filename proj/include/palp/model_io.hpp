#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "palp/mdp.hpp"

namespace palp {

/// Malformed model, basis, partition or metadata document. The message
/// carries the parser position or the offending field path.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string model_to_string(const FactoredMdp& mdp);
FactoredMdp model_from_string(const std::string& text);

void save_model(const FactoredMdp& mdp, const std::filesystem::path& path);
FactoredMdp load_model(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace palp

// commands.hpp — Batch CLI commands over the library: file-based configs in,
// CSV/JSON artifacts plus a reproducibility manifest out.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ovtom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kVersion = "0.1.0";

struct CommonOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

int cmd_simulate(const std::string& config_path, const CommonOverrides& overrides);
int cmd_reconstruct(const std::string& config_path, const CommonOverrides& overrides);
int cmd_infer_overlap(const std::string& config_path, const CommonOverrides& overrides);
int cmd_fit_profile(const std::string& config_path, const CommonOverrides& overrides);
int cmd_kernel_table(const std::string& config_path, const CommonOverrides& overrides);
int cmd_validate(bool fast, const std::optional<std::string>& out_dir);

// Full argv entry point used by the binary.
int run(int argc, const char* const* argv);

} // namespace ovtom::cli

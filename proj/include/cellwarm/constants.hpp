#pragma once

namespace cellwarm {

inline constexpr double kFaraday = 96485.33212;        // C/mol
inline constexpr double kGasConstant = 8.31446261815;  // J/(mol K)

}  // namespace cellwarm

#pragma once

#include <string>
#include <string_view>

// Deterministic serialization helpers shared by the scenario runner and its
// tests: reports must be byte-identical across runs and worker counts.
namespace cocyc {

// The double nearest the 15-significant-digit decimal rendering of v; all
// numbers entering a report pass through this, so the emitted digit strings
// are stable regardless of how the value was computed.
double round_sig15(double v);

// %.17g-free shortest decimal form of round_sig15(v), as emitted in CSV.
std::string format_number(double v);

// FNV-1a 64-bit digest, 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace cocyc

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace depwatch {

enum class BinaryKind {
  DynamicExecutable,  // ET_EXEC with PT_DYNAMIC, or ET_DYN with PT_INTERP
  SharedObject,       // ET_DYN without PT_INTERP
  StaticExecutable,   // ET_EXEC without PT_DYNAMIC
  Other,              // relocatable, core, ...
};

/// Cheap header probe: identifies the file kind from the ELF header and
/// program headers. Returns std::nullopt for non-ELF bytes; malformed ELF
/// headers yield nullopt too (callers treat them as unscannable files).
std::optional<BinaryKind> probe_binary(std::span<const std::uint8_t> bytes);

/// Sonames from the dynamic section's needed-library entries, in file order
/// with duplicates removed (first occurrence wins). A binary without a
/// dynamic section yields an empty list. Throws BinaryParseError with the
/// offending byte offset on truncated or corrupt structures.
std::vector<std::string> extract_needed(std::span<const std::uint8_t> bytes);

}  // namespace depwatch

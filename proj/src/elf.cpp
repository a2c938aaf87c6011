#include "depwatch/elf.hpp"

#include "depwatch/errors.hpp"

namespace depwatch {

namespace {

constexpr std::uint32_t kPtLoad = 1;
constexpr std::uint32_t kPtDynamic = 2;
constexpr std::uint32_t kPtInterp = 3;

constexpr std::int64_t kDtNull = 0;
constexpr std::int64_t kDtNeeded = 1;
constexpr std::int64_t kDtStrtab = 5;

constexpr std::uint16_t kEtExec = 2;
constexpr std::uint16_t kEtDyn = 3;

// Bounds-checked little/big-endian readers over the raw file image.
class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, bool little_endian)
      : bytes_(bytes), little_(little_endian) {}

  std::size_t size() const { return bytes_.size(); }

  std::uint8_t u8(std::size_t off) const {
    require(off, 1);
    return bytes_[off];
  }

  std::uint16_t u16(std::size_t off) const { return read<std::uint16_t>(off); }
  std::uint32_t u32(std::size_t off) const { return read<std::uint32_t>(off); }
  std::uint64_t u64(std::size_t off) const { return read<std::uint64_t>(off); }

  std::string cstring(std::size_t off) const {
    std::string out;
    std::size_t i = off;
    while (true) {
      if (i >= bytes_.size()) {
        throw BinaryParseError("unterminated string in string table", off);
      }
      if (bytes_[i] == 0) break;
      out.push_back(static_cast<char>(bytes_[i]));
      ++i;
    }
    return out;
  }

 private:
  template <typename T>
  T read(std::size_t off) const {
    require(off, sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      std::size_t byte = little_ ? i : sizeof(T) - 1 - i;
      v |= static_cast<T>(bytes_[off + byte]) << (8 * i);
    }
    return v;
  }

  void require(std::size_t off, std::size_t n) const {
    if (off + n > bytes_.size() || off + n < off) {
      throw BinaryParseError("read past end of file", off);
    }
  }

  std::span<const std::uint8_t> bytes_;
  bool little_;
};

struct Layout {
  bool is64;
  Reader reader;
  std::uint16_t type;
  std::uint64_t phoff;
  std::uint16_t phentsize;
  std::uint16_t phnum;
};

struct ProgramHeader {
  std::uint32_t type;
  std::uint64_t offset;
  std::uint64_t vaddr;
  std::uint64_t filesz;
};

std::optional<Layout> read_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) return std::nullopt;
  if (bytes[0] != 0x7f || bytes[1] != 'E' || bytes[2] != 'L' ||
      bytes[3] != 'F') {
    return std::nullopt;
  }
  std::uint8_t cls = bytes[4];
  std::uint8_t data = bytes[5];
  if ((cls != 1 && cls != 2) || (data != 1 && data != 2)) return std::nullopt;
  bool is64 = cls == 2;
  Reader r(bytes, data == 1);
  Layout layout{is64, r, 0, 0, 0, 0};
  layout.type = r.u16(0x10);
  if (is64) {
    layout.phoff = r.u64(0x20);
    layout.phentsize = r.u16(0x36);
    layout.phnum = r.u16(0x38);
  } else {
    layout.phoff = r.u32(0x1c);
    layout.phentsize = r.u16(0x2a);
    layout.phnum = r.u16(0x2c);
  }
  return layout;
}

ProgramHeader read_phdr(const Layout& l, std::size_t index) {
  std::size_t base = l.phoff + static_cast<std::size_t>(index) * l.phentsize;
  ProgramHeader ph{};
  ph.type = l.reader.u32(base);
  if (l.is64) {
    ph.offset = l.reader.u64(base + 0x08);
    ph.vaddr = l.reader.u64(base + 0x10);
    ph.filesz = l.reader.u64(base + 0x20);
  } else {
    ph.offset = l.reader.u32(base + 0x04);
    ph.vaddr = l.reader.u32(base + 0x08);
    ph.filesz = l.reader.u32(base + 0x10);
  }
  return ph;
}

std::uint64_t vaddr_to_offset(const Layout& l,
                              const std::vector<ProgramHeader>& phdrs,
                              std::uint64_t vaddr) {
  for (const ProgramHeader& ph : phdrs) {
    if (ph.type == kPtLoad && vaddr >= ph.vaddr &&
        vaddr < ph.vaddr + ph.filesz) {
      return vaddr - ph.vaddr + ph.offset;
    }
  }
  throw BinaryParseError("string table address not covered by any load segment",
                         static_cast<std::size_t>(vaddr));
}

}  // namespace

std::optional<BinaryKind> probe_binary(std::span<const std::uint8_t> bytes) {
  auto layout = read_header(bytes);
  if (!layout) return std::nullopt;
  if (layout->type != kEtExec && layout->type != kEtDyn) {
    return BinaryKind::Other;
  }
  bool has_dynamic = false;
  bool has_interp = false;
  try {
    for (std::size_t i = 0; i < layout->phnum; ++i) {
      ProgramHeader ph = read_phdr(*layout, i);
      if (ph.type == kPtDynamic) has_dynamic = true;
      if (ph.type == kPtInterp) has_interp = true;
    }
  } catch (const BinaryParseError&) {
    return std::nullopt;
  }
  if (layout->type == kEtExec) {
    return has_dynamic ? BinaryKind::DynamicExecutable
                       : BinaryKind::StaticExecutable;
  }
  // ET_DYN covers both shared objects and position-independent executables;
  // the interpreter request is what separates them.
  return has_interp ? BinaryKind::DynamicExecutable : BinaryKind::SharedObject;
}

std::vector<std::string> extract_needed(std::span<const std::uint8_t> bytes) {
  auto layout = read_header(bytes);
  if (!layout) {
    throw BinaryParseError("not an ELF image", 0);
  }
  std::vector<ProgramHeader> phdrs;
  phdrs.reserve(layout->phnum);
  for (std::size_t i = 0; i < layout->phnum; ++i) {
    phdrs.push_back(read_phdr(*layout, i));
  }
  const ProgramHeader* dynamic = nullptr;
  for (const ProgramHeader& ph : phdrs) {
    if (ph.type == kPtDynamic) {
      dynamic = &ph;
      break;
    }
  }
  if (!dynamic) return {};  // statically linked

  const Reader& r = layout->reader;
  std::size_t entry_size = layout->is64 ? 16 : 8;
  std::vector<std::uint64_t> needed_offsets;
  std::optional<std::uint64_t> strtab_vaddr;

  std::size_t pos = dynamic->offset;
  std::size_t end = dynamic->offset + dynamic->filesz;
  bool saw_null = false;
  while (pos + entry_size <= end) {
    std::int64_t tag;
    std::uint64_t val;
    if (layout->is64) {
      tag = static_cast<std::int64_t>(r.u64(pos));
      val = r.u64(pos + 8);
    } else {
      tag = static_cast<std::int32_t>(r.u32(pos));
      val = r.u32(pos + 4);
    }
    if (tag == kDtNull) {
      saw_null = true;
      break;
    }
    if (tag == kDtNeeded) needed_offsets.push_back(val);
    if (tag == kDtStrtab) strtab_vaddr = val;
    pos += entry_size;
  }
  if (!saw_null) {
    throw BinaryParseError("dynamic section not terminated", pos);
  }
  if (needed_offsets.empty()) return {};
  if (!strtab_vaddr) {
    throw BinaryParseError("dynamic section has needed entries but no string table",
                           dynamic->offset);
  }

  std::uint64_t strtab_off = vaddr_to_offset(*layout, phdrs, *strtab_vaddr);
  std::vector<std::string> needed;
  for (std::uint64_t name_off : needed_offsets) {
    std::string name = r.cstring(strtab_off + name_off);
    if (name.empty()) continue;
    bool seen = false;
    for (const std::string& existing : needed) {
      if (existing == name) {
        seen = true;
        break;
      }
    }
    if (!seen) needed.push_back(std::move(name));
  }
  return needed;
}

}  // namespace depwatch

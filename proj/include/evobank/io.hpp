#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evobank/core.hpp"
#include "evobank/evolution.hpp"
#include "evobank/matrix.hpp"

namespace evobank::io {

inline constexpr char kBlockMagic[4] = {'P', 'I', 'B', 'E'};
inline constexpr std::uint16_t kBlockVersion = 1;
inline constexpr std::size_t kBlockHeaderSize = 16;
inline constexpr int kManifestVersion = 1;

// Bank directory layout.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kEntriesFile = "entries.jsonl";
inline constexpr const char* kScoresFile = "scores.jsonl";
inline constexpr const char* kHistoryIndexFile = "history_index.json";
inline constexpr const char* kHistoryRowsFile = "history_rows.bin";
inline constexpr const char* kHistoryColsFile = "history_cols.bin";
inline constexpr const char* kParticipantsFile = "participants.bin";
inline constexpr const char* kLockFile = ".lock";

/// Reads line-delimited candidate records ({"id", "embedding", "quality",
/// optional "source" and "meta"}). Errors name the offending line.
Pool ingest_candidates(const std::filesystem::path& path,
                       std::optional<std::size_t> dimension = std::nullopt);
Pool parse_candidates(std::istream& in, std::optional<std::size_t> dimension = std::nullopt);

void write_candidates(const std::filesystem::path& path, std::span<const CandidatePoint> points);
void write_candidates(std::ostream& out, std::span<const CandidatePoint> points);

/// 16-byte header (magic, u16 version, u32 rows, u32 cols, 2 pad bytes) followed
/// by row-major little-endian float32 values.
std::string encode_block(const Matrix& m);
Matrix decode_block(std::string_view bytes);

std::string sha256_hex(std::string_view bytes);

void save_bank(const BankState& bank, const std::filesystem::path& dir);
BankState load_bank(const std::filesystem::path& dir);

/// Exclusive lock file held for the lifetime of the object. Throws LockHeld
/// if another holder exists.
class DirectoryLock {
public:
    explicit DirectoryLock(std::filesystem::path dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

}  // namespace evobank::io

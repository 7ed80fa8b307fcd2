#pragma once

#include "gridauth/clock.hpp"
#include "gridauth/credential_crypto.hpp"
#include "gridauth/encoding.hpp"
#include "gridauth/ssr_key.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gridauth {

class EntropySource;

// 3..32 ASCII letters or digits; comparison is case-sensitive.
class Username {
public:
    static constexpr std::size_t kMinLength = 3;
    static constexpr std::size_t kMaxLength = 32;

    // Throws ValidationError.
    explicit Username(std::string value);

    static bool is_valid(std::string_view value);

    const std::string& value() const { return value_; }

    friend bool operator==(const Username&, const Username&) = default;

private:
    std::string value_;
};

struct UserRecord {
    Bytes username_ct; // deterministic AES-SIV of the username
    Bytes key_ct;      // AES-GCM of the 4 key characters, bound to username_ct
    TimePoint created_at{};
    int failed_attempts = 0;
    std::optional<TimePoint> locked_until;
};

struct LockoutPolicy {
    int threshold = 5;
    std::chrono::seconds window = std::chrono::minutes{30};
};

struct LockStatus {
    std::optional<TimePoint> locked_until; // set only while locked

    bool locked() const { return locked_until.has_value(); }
};

// Result of one serialized check-verify-record step.
enum class AttemptOutcome { accepted, rejected, locked };

// Encrypted user records kept in an in-memory index and persisted to a
// line-oriented file:
//
//   v1|<b64 username_ct>|<b64 key_ct>|<created_at>|<failed_attempts>|<locked_until or ->
//
// Every mutation appends the record's new state; later lines supersede
// earlier ones for the same username_ct. The file is rewritten (compacted)
// when superseded lines outnumber live ones, and on flush().
//
// One writer at a time; readers run concurrently against the index.
class AccountsStore {
public:
    struct Options {
        std::filesystem::path path; // empty: memory only
        LockoutPolicy lockout;
    };

    // Loads `options.path` if it exists. Throws StorageError on a corrupt or
    // unreadable file and AuthenticationError if records do not open with
    // this key.
    AccountsStore(const StoreKey& key, Options options);

    AccountsStore(const AccountsStore&) = delete;
    AccountsStore& operator=(const AccountsStore&) = delete;

    // Returns the new plaintext key. Throws ConflictError if the username is
    // taken, StorageError if persisting fails (nothing is recorded then).
    KeyNumber register_user(const Username& username, EntropySource& entropy, TimePoint now);

    std::optional<UserRecord> lookup(const Username& username) const;

    // Increments the counter; on reaching the threshold sets locked_until and
    // resets the counter. Throws NotFoundError.
    UserRecord record_failure(const Username& username, TimePoint now);
    // Resets the counter. Throws NotFoundError.
    UserRecord record_success(const Username& username);
    LockStatus check_lockout(const Username& username, TimePoint now) const;

    // Lockout check, verification and bookkeeping as one atomic step. If the
    // user is locked, `verify` is not called. Throws NotFoundError.
    AttemptOutcome settle_attempt(const Username& username, TimePoint now,
                                  const std::function<bool(const KeyNumber& stored)>& verify);

    KeyNumber decrypt_key(const UserRecord& record) const;
    Username decrypt_username(const UserRecord& record) const;

    std::size_t size() const;
    const LockoutPolicy& lockout_policy() const { return options_.lockout; }

    // Rewrites the file with exactly one line per record.
    void flush();

private:
    using Index = std::unordered_map<std::string, UserRecord>;

    std::string index_key(const Username& username) const;
    UserRecord& find_locked(const std::string& key);
    UserRecord apply_failure(UserRecord& record, TimePoint now);
    void persist(const UserRecord& record);
    void load();
    void compact_locked();
    void maybe_compact();

    CredentialCipher cipher_;
    Options options_;
    mutable std::shared_mutex mutex_;
    Index index_;
    std::size_t lines_on_disk_ = 0;
};

std::string serialize_record(const UserRecord& record);
// Throws StorageError on malformed input.
UserRecord parse_record(std::string_view line);

} // namespace gridauth

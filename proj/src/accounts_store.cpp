#include "gridauth/accounts_store.hpp"

#include "gridauth/entropy.hpp"
#include "gridauth/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <mutex>

namespace gridauth {

namespace {

constexpr std::string_view kVersion = "v1";

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string bytes_key(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

} // namespace

Username::Username(std::string value) : value_(std::move(value)) {
    if (!is_valid(value_)) {
        throw ValidationError("username must be 3-32 letters or digits");
    }
}

bool Username::is_valid(std::string_view value) {
    return value.size() >= kMinLength && value.size() <= kMaxLength &&
           std::all_of(value.begin(), value.end(), [](char c) {
               const auto u = static_cast<unsigned char>(c);
               return u < 0x80 && std::isalnum(u);
           });
}

std::string serialize_record(const UserRecord& record) {
    std::string line{kVersion};
    line += '|';
    line += base64_encode(record.username_ct);
    line += '|';
    line += base64_encode(record.key_ct);
    line += '|';
    line += format_rfc3339(record.created_at);
    line += '|';
    line += std::to_string(record.failed_attempts);
    line += '|';
    line += record.locked_until ? format_rfc3339(*record.locked_until) : "-";
    return line;
}

UserRecord parse_record(std::string_view line) {
    const auto fields = split(line, '|');
    if (fields.size() != 6 || fields[0] != kVersion) {
        throw StorageError("malformed store record");
    }
    UserRecord r;
    auto username_ct = base64_decode(fields[1]);
    auto key_ct = base64_decode(fields[2]);
    const auto created = parse_rfc3339(fields[3]);
    if (!username_ct || !key_ct || !created) {
        throw StorageError("malformed store record");
    }
    r.username_ct = std::move(*username_ct);
    r.key_ct = std::move(*key_ct);
    r.created_at = *created;

    const auto f = fields[4];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), r.failed_attempts);
    if (ec != std::errc{} || ptr != f.data() + f.size() || r.failed_attempts < 0) {
        throw StorageError("malformed failure counter in store record");
    }
    if (fields[5] != "-") {
        r.locked_until = parse_rfc3339(fields[5]);
        if (!r.locked_until) {
            throw StorageError("malformed lock expiry in store record");
        }
    }
    return r;
}

AccountsStore::AccountsStore(const StoreKey& key, Options options)
    : cipher_(key), options_(std::move(options)) {
    if (options_.lockout.threshold < 1) {
        throw ConfigError("lockout threshold must be at least 1");
    }
    if (options_.lockout.window.count() < 0) {
        throw ConfigError("lockout window must not be negative");
    }
    load();
}

std::string AccountsStore::index_key(const Username& username) const {
    return bytes_key(cipher_.encrypt_deterministic(as_bytes(username.value())));
}

void AccountsStore::load() {
    if (options_.path.empty() || !std::filesystem::exists(options_.path)) {
        return;
    }
    std::ifstream in(options_.path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot open store file " + options_.path.string());
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        UserRecord r = parse_record(line);
        std::string k = bytes_key(r.username_ct);
        index_[std::move(k)] = std::move(r);
        ++lines_on_disk_;
    }
    if (in.bad()) {
        throw StorageError("error reading store file " + options_.path.string());
    }
    // Every record must open with the configured key.
    for (const auto& [_, r] : index_) {
        decrypt_username(r);
        decrypt_key(r);
    }
}

void AccountsStore::persist(const UserRecord& record) {
    if (options_.path.empty()) {
        return;
    }
    std::ofstream out(options_.path, std::ios::binary | std::ios::app);
    out << serialize_record(record) << '\n';
    out.flush();
    if (!out) {
        throw StorageError("cannot append to store file " + options_.path.string());
    }
    ++lines_on_disk_;
}

void AccountsStore::maybe_compact() {
    if (lines_on_disk_ > 2 * index_.size() + 16) {
        compact_locked();
    }
}

void AccountsStore::compact_locked() {
    if (options_.path.empty()) {
        return;
    }
    auto tmp = options_.path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        for (const auto& [_, r] : index_) {
            out << serialize_record(r) << '\n';
        }
        out.flush();
        if (!out) {
            throw StorageError("cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, options_.path, ec);
    if (ec) {
        throw StorageError("cannot replace store file: " + ec.message());
    }
    lines_on_disk_ = index_.size();
}

KeyNumber AccountsStore::register_user(const Username& username, EntropySource& entropy, TimePoint now) {
    UserRecord r;
    r.username_ct = cipher_.encrypt_deterministic(as_bytes(username.value()));
    std::string k = bytes_key(r.username_ct);

    std::unique_lock lock(mutex_);
    if (index_.contains(k)) {
        throw ConflictError("username already registered");
    }
    const KeyNumber key = generate_key(entropy);
    r.key_ct = cipher_.encrypt(as_bytes(key.to_string()), entropy, r.username_ct);
    r.created_at = now;
    // Insert only after the line is on disk.
    persist(r);
    index_.emplace(std::move(k), std::move(r));
    maybe_compact();
    return key;
}

std::optional<UserRecord> AccountsStore::lookup(const Username& username) const {
    const std::string k = index_key(username);
    std::shared_lock lock(mutex_);
    const auto it = index_.find(k);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

UserRecord& AccountsStore::find_locked(const std::string& key) {
    const auto it = index_.find(key);
    if (it == index_.end()) {
        throw NotFoundError("unknown user");
    }
    return it->second;
}

UserRecord AccountsStore::apply_failure(UserRecord& record, TimePoint now) {
    UserRecord next = record;
    ++next.failed_attempts;
    if (next.failed_attempts >= options_.lockout.threshold) {
        next.locked_until = now + options_.lockout.window;
        next.failed_attempts = 0;
    }
    persist(next);
    record = next;
    maybe_compact();
    return next;
}

UserRecord AccountsStore::record_failure(const Username& username, TimePoint now) {
    const std::string k = index_key(username);
    std::unique_lock lock(mutex_);
    return apply_failure(find_locked(k), now);
}

UserRecord AccountsStore::record_success(const Username& username) {
    const std::string k = index_key(username);
    std::unique_lock lock(mutex_);
    UserRecord& record = find_locked(k);
    if (record.failed_attempts == 0) {
        return record;
    }
    UserRecord next = record;
    next.failed_attempts = 0;
    persist(next);
    record = next;
    maybe_compact();
    return next;
}

LockStatus AccountsStore::check_lockout(const Username& username, TimePoint now) const {
    const auto record = lookup(username);
    if (!record) {
        throw NotFoundError("unknown user");
    }
    if (record->locked_until && now < *record->locked_until) {
        return LockStatus{record->locked_until};
    }
    return LockStatus{};
}

AttemptOutcome AccountsStore::settle_attempt(const Username& username, TimePoint now,
                                             const std::function<bool(const KeyNumber&)>& verify) {
    const std::string k = index_key(username);
    std::unique_lock lock(mutex_);
    UserRecord& record = find_locked(k);
    if (record.locked_until && now < *record.locked_until) {
        return AttemptOutcome::locked;
    }
    if (verify(decrypt_key(record))) {
        if (record.failed_attempts != 0) {
            UserRecord next = record;
            next.failed_attempts = 0;
            persist(next);
            record = next;
            maybe_compact();
        }
        return AttemptOutcome::accepted;
    }
    apply_failure(record, now);
    return AttemptOutcome::rejected;
}

KeyNumber AccountsStore::decrypt_key(const UserRecord& record) const {
    const Bytes pt = cipher_.decrypt(record.key_ct, record.username_ct);
    try {
        return KeyNumber::parse(std::string_view(reinterpret_cast<const char*>(pt.data()), pt.size()));
    } catch (const ValidationError&) {
        throw StorageError("stored key is not a 4-digit key");
    }
}

Username AccountsStore::decrypt_username(const UserRecord& record) const {
    const Bytes pt = cipher_.decrypt_deterministic(record.username_ct);
    std::string s(pt.begin(), pt.end());
    if (!Username::is_valid(s)) {
        throw StorageError("stored username is invalid");
    }
    return Username(std::move(s));
}

std::size_t AccountsStore::size() const {
    std::shared_lock lock(mutex_);
    return index_.size();
}

void AccountsStore::flush() {
    std::unique_lock lock(mutex_);
    compact_locked();
}

} // namespace gridauth

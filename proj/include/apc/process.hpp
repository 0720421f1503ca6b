// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

namespace apc {

struct ProcessResult {
    std::string out;
    std::string err;
    int exit_code = -1;        // valid when the process exited normally
    bool exec_failed = false;  // the program could not be started
    bool timed_out = false;
    bool cancelled = false;
};

inline constexpr std::chrono::milliseconds poll_interval{20};

/// Runs `argv` in its own process group, feeding `input` on stdin and
/// collecting stdout/stderr. On timeout or stop request the whole group is
/// killed and reaped before returning.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds timeout, std::stop_token stop = {});

/// A file under $TMPDIR (or /tmp) removed when the object is destroyed.
class TempFile {
public:
    TempFile(const std::string& contents, const std::string& suffix);
    ~TempFile();
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

}  // namespace apc

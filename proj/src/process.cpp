// SPDX-License-Identifier: Apache-2.0
#include "apc/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <system_error>

namespace apc {

namespace {

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() { reset(); }
    Fd(Fd&& o) noexcept : fd_(o.release()) {}
    Fd& operator=(Fd&& o) noexcept {
        if (this != &o) {
            reset(o.release());
        }
        return *this;
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;

    [[nodiscard]] int get() const { return fd_; }
    int release() { return std::exchange(fd_, -1); }
    void reset(int fd = -1) {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        fd_ = fd;
    }

private:
    int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe() {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) {
        throw std::system_error(errno, std::generic_category(), "pipe");
    }
    return {Fd(fds[0]), Fd(fds[1])};
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds timeout, std::stop_token stop) {
    if (argv.empty()) {
        throw std::invalid_argument("empty command");
    }
    auto [in_r, in_w] = make_pipe();
    auto [out_r, out_w] = make_pipe();
    auto [err_r, err_w] = make_pipe();
    auto [exec_r, exec_w] = make_pipe();

    std::vector<char*> args;
    for (const auto& a : argv) {
        args.push_back(const_cast<char*>(a.c_str()));
    }
    args.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
        throw std::system_error(errno, std::generic_category(), "fork");
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(in_r.get(), STDIN_FILENO);
        ::dup2(out_w.get(), STDOUT_FILENO);
        ::dup2(err_w.get(), STDERR_FILENO);
        ::execvp(args[0], args.data());
        const int e = errno;
        [[maybe_unused]] auto n = ::write(exec_w.get(), &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid, pid);  // also from the parent, to avoid racing the child
    in_r.reset();
    out_w.reset();
    err_w.reset();
    exec_w.reset();

    ProcessResult result;
    int child_errno = 0;
    if (::read(exec_r.get(), &child_errno, sizeof child_errno) == static_cast<ssize_t>(sizeof child_errno)) {
        result.exec_failed = true;
        result.err = std::string("cannot execute '") + argv[0] + "': " + std::strerror(child_errno);
        ::waitpid(pid, nullptr, 0);
        return result;
    }

    set_nonblocking(in_w.get());
    set_nonblocking(out_r.get());
    set_nonblocking(err_r.get());
    std::size_t written = 0;
    if (input.empty()) {
        in_w.reset();
    }

    const auto deadline = std::chrono::steady_clock::now() + timeout;
    char buf[65536];
    bool killed = false;
    while (out_r.get() >= 0 || err_r.get() >= 0) {
        if (!killed) {
            if (stop.stop_requested()) {
                result.cancelled = true;
            } else if (std::chrono::steady_clock::now() >= deadline) {
                result.timed_out = true;
            }
            if (result.cancelled || result.timed_out) {
                ::kill(-pid, SIGKILL);
                killed = true;
                in_w.reset();
            }
        }
        pollfd fds[3];
        nfds_t n = 0;
        for (int fd : {out_r.get(), err_r.get()}) {
            if (fd >= 0) {
                fds[n++] = {fd, POLLIN, 0};
            }
        }
        if (in_w.get() >= 0) {
            fds[n++] = {in_w.get(), POLLOUT, 0};
        }
        if (::poll(fds, n, static_cast<int>(poll_interval.count())) < 0 && errno != EINTR) {
            break;
        }
        for (nfds_t i = 0; i < n; ++i) {
            if (fds[i].revents == 0) {
                continue;
            }
            if (fds[i].fd == in_w.get()) {
                const ssize_t w = ::write(in_w.get(), input.data() + written, input.size() - written);
                if (w > 0) {
                    written += static_cast<std::size_t>(w);
                }
                if (w < 0 && errno != EAGAIN) {
                    in_w.reset();
                } else if (written == input.size()) {
                    in_w.reset();
                }
                continue;
            }
            const ssize_t r = ::read(fds[i].fd, buf, sizeof buf);
            if (r > 0) {
                (fds[i].fd == out_r.get() ? result.out : result.err).append(buf, static_cast<std::size_t>(r));
            } else if (r == 0 || errno != EAGAIN) {
                (fds[i].fd == out_r.get() ? out_r : err_r).reset();
            }
        }
    }
    in_w.reset();
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (!killed) {
        // output closed; make sure no stray grandchildren survive
        ::kill(-pid, SIGKILL);
    }
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    }
    return result;
}

TempFile::TempFile(const std::string& contents, const std::string& suffix) {
    const char* dir = std::getenv("TMPDIR");
    std::string templ = std::string(dir != nullptr && *dir != '\0' ? dir : "/tmp") + "/apc-XXXXXX" + suffix;
    const int fd = ::mkstemps(templ.data(), static_cast<int>(suffix.size()));
    if (fd < 0) {
        throw std::system_error(errno, std::generic_category(), "mkstemps");
    }
    Fd guard(fd);
    std::size_t off = 0;
    while (off < contents.size()) {
        const ssize_t w = ::write(fd, contents.data() + off, contents.size() - off);
        if (w < 0) {
            if (errno == EINTR) {
                continue;
            }
            ::unlink(templ.c_str());
            throw std::system_error(errno, std::generic_category(), "write " + templ);
        }
        off += static_cast<std::size_t>(w);
    }
    path_ = std::move(templ);
}

TempFile::~TempFile() { ::unlink(path_.c_str()); }

}  // namespace apc

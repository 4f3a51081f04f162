// Copyright 2026 The Mutspec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mutspec/process.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <vector>

#include "mutspec/error.h"

extern char** environ;

namespace mutspec {
namespace {

constexpr std::size_t kCaptureCap = 4 * 1024 * 1024;

std::vector<std::string> BuildEnv(const std::map<std::string, std::string>& env) {
  std::map<std::string, std::string> merged;
  for (char** e = environ; *e != nullptr; ++e) {
    std::string_view kv(*e);
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    merged[std::string(kv.substr(0, eq))] = std::string(kv.substr(eq + 1));
  }
  for (const auto& [k, v] : env) merged[k] = v;
  std::vector<std::string> out;
  for (const auto& [k, v] : merged) out.push_back(k + "=" + v);
  return out;
}

void Drain(int fd, std::string& sink, bool& open) {
  char buf[8192];
  ssize_t n = read(fd, buf, sizeof buf);
  if (n > 0) {
    if (sink.size() < kCaptureCap) sink.append(buf, static_cast<std::size_t>(n));
  } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
    open = false;
  }
}

}  // namespace

ProcessResult RunProcess(const std::string& command,
                         const std::filesystem::path& cwd,
                         const std::map<std::string, std::string>& env,
                         int timeout_ms) {
  std::vector<std::string> env_strings = BuildEnv(env);
  std::vector<char*> envp;
  for (auto& s : env_strings) envp.push_back(s.data());
  envp.push_back(nullptr);
  std::string cwd_str = cwd.string();
  const char* argv[] = {"sh", "-c", command.c_str(), nullptr};

  int out_pipe[2], err_pipe[2], status_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0 ||
      pipe2(status_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kSpawnFailure,
                std::string("pipe: ") + std::strerror(errno));
  }
  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    throw Error(ErrorCode::kSpawnFailure,
                std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(err_pipe[0]);
    close(status_pipe[0]);
    int err = 0;
    if (!cwd_str.empty() && chdir(cwd_str.c_str()) != 0) {
      err = errno;
    } else {
      execve("/bin/sh", const_cast<char* const*>(argv), envp.data());
      err = errno;
    }
    ssize_t ignored = write(status_pipe[1], &err, sizeof err);
    (void)ignored;
    _exit(127);
  }
  setpgid(pid, pid);
  close(out_pipe[1]);
  close(err_pipe[1]);
  close(status_pipe[1]);

  int child_errno = 0;
  ssize_t got = read(status_pipe[0], &child_errno, sizeof child_errno);
  close(status_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof child_errno)) {
    close(out_pipe[0]);
    close(err_pipe[0]);
    waitpid(pid, nullptr, 0);
    throw Error(ErrorCode::kSpawnFailure,
                "cannot start '" + command + "': " + std::strerror(child_errno));
  }

  ProcessResult result;
  auto deadline = start + std::chrono::milliseconds(timeout_ms);
  bool out_open = true;
  bool err_open = true;
  while (out_open || err_open) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      break;
    }
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count()) + 1;
    pollfd fds[2];
    int nfds = 0;
    if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
    int rc = poll(fds, nfds, wait_ms);
    if (rc < 0 && errno == EINTR) continue;
    for (int i = 0; i < nfds; ++i) {
      if (fds[i].revents == 0) continue;
      if (fds[i].fd == out_pipe[0]) {
        Drain(out_pipe[0], result.out, out_open);
      } else {
        Drain(err_pipe[0], result.err, err_open);
      }
    }
  }

  int status = 0;
  if (!result.timed_out) {
    // Streams closed; the shell may still be exiting.
    while (true) {
      pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        result.timed_out = true;
        break;
      }
      usleep(1000);
    }
  }
  if (result.timed_out) {
    kill(-pid, SIGKILL);
    waitpid(pid, &status, 0);
  } else if (WIFEXITED(status)) {
    result.exit_status = WEXITSTATUS(status);
  }
  close(out_pipe[0]);
  close(err_pipe[0]);
  result.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return result;
}

TempDir::TempDir(std::string_view prefix) {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / (std::string(prefix) + "-XXXXXX"))
          .string();
  if (mkdtemp(tmpl.data()) == nullptr) {
    throw Error(ErrorCode::kIoError,
                std::string("mkdtemp: ") + std::strerror(errno));
  }
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace mutspec

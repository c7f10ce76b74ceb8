// Copyright 2026 The kdnas Authors.
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

#ifndef KDNAS_WORKER_H_
#define KDNAS_WORKER_H_

#include <chrono>
#include <string>
#include <sys/types.h>
#include <vector>

namespace kdnas {

// A child process (`/bin/sh -c command`) talking newline-delimited records
// over its stdin/stdout. stderr is inherited.
class WorkerProcess {
 public:
  enum class ReadStatus { kLine, kEof, kTimeout };

  // Throws WorkerError when the process cannot be started.
  explicit WorkerProcess(const std::string& command);
  ~WorkerProcess();

  WorkerProcess(const WorkerProcess&) = delete;
  WorkerProcess& operator=(const WorkerProcess&) = delete;

  // Sends {"hello": version} and waits for {"ready": true, ...}. Returns the
  // advertised capabilities; throws WorkerError otherwise.
  std::vector<std::string> Handshake(int protocol_version,
                                     std::chrono::milliseconds timeout);

  // False when the worker is gone.
  bool SendLine(const std::string& line);
  ReadStatus ReadLine(std::string* line, std::chrono::milliseconds timeout);

  void Kill();
  pid_t pid() const { return pid_; }

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace kdnas

#endif  // KDNAS_WORKER_H_

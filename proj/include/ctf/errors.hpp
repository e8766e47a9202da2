/*
 * Copyright 2026 The ctfsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace ctf {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Conductance outside the device operating window.
class DomainError : public Error {
public:
  using Error::Error;
};

// Caller violated an operation precondition (sizes, signs, stale state).
class PreconditionError : public Error {
public:
  using Error::Error;
};

// Weight scale does not fit inside the conductance window for the chosen k.
class InitializationError : public Error {
public:
  using Error::Error;
};

// Malformed or truncated input file.
class FormatError : public Error {
public:
  using Error::Error;
};

// Tile coder ran out of hash-table slots.
class CapacityError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace ctf

// Spawns the real backend service for integration tests and tears it down.

import { spawn, ChildProcess, execFileSync } from "node:child_process";

export interface Backend {
  base: string;
  proc: ChildProcess;
}

export async function startBackend(rngSeed = 7): Promise<Backend> {
  const proc = spawn(
    "python3",
    ["-m", "legwork.cli", "serve", "--port", "0", "--rng-seed", String(rngSeed)],
    { stdio: ["ignore", "pipe", "inherit"] },
  );
  const base = await new Promise<string>((resolve, reject) => {
    let buffer = "";
    const onData = (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/http:\/\/127\.0\.0\.1:(\d+)/);
      if (match) {
        proc.stdout!.off("data", onData);
        resolve(`http://127.0.0.1:${match[1]}`);
      }
    };
    proc.stdout!.on("data", onData);
    proc.on("exit", (code) => reject(new Error(`backend exited early: ${code}`)));
    setTimeout(() => reject(new Error("backend start timeout")), 60_000);
  });
  return { base, proc };
}

export function stopBackend(backend: Backend): void {
  backend.proc.kill("SIGTERM");
}

// Runs the CLI synchronously (experiment runs for cross-checking the stream).
export function runCli(args: string[]): string {
  return execFileSync("python3", ["-m", "legwork.cli", ...args], {
    encoding: "utf-8",
    timeout: 150_000,
  });
}

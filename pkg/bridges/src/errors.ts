/** Contract violations: bad options, malformed inputs, backend failures. */
export class BridgeError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "BridgeError";
  }
}

/** Wrap an error with positional context (which frame, which file). */
export function withContext(context: string, err: unknown): never {
  const detail = err instanceof Error ? err.message : String(err);
  if (err instanceof Error && "code" in err) {
    // keep I/O errors recognizable (exit-code mapping looks at .code)
    const wrapped = new Error(`${context}: ${detail}`) as NodeJS.ErrnoException;
    wrapped.code = (err as NodeJS.ErrnoException).code;
    throw wrapped;
  }
  throw new BridgeError(`${context}: ${detail}`);
}

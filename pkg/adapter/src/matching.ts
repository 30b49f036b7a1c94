/**
 * Occurrence test mirroring the pipeline's match rule: case-insensitive,
 * delimited by word boundaries (start/end of text or a non-alphanumeric
 * character).
 */

const ALNUM = /[\p{L}\p{N}]/u;

function boundaryOk(text: string, start: number, end: number): boolean {
  if (start > 0 && ALNUM.test(text[start - 1])) return false;
  if (end < text.length && ALNUM.test(text[end])) return false;
  return true;
}

export function containsSurface(context: string, surface: string): boolean {
  const needle = surface.toLowerCase();
  if (needle.length === 0) return false;
  const haystack = context.toLowerCase();
  if (haystack.length !== context.length || needle.length !== surface.length) {
    // lowercasing changed lengths (rare); fall back to a per-position scan
    for (let i = 0; i + surface.length <= context.length; i++) {
      if (
        context.slice(i, i + surface.length).toLowerCase() === needle &&
        boundaryOk(context, i, i + surface.length)
      ) {
        return true;
      }
    }
    return false;
  }
  let pos = 0;
  while (true) {
    const i = haystack.indexOf(needle, pos);
    if (i === -1) return false;
    if (boundaryOk(context, i, i + needle.length)) return true;
    pos = i + 1;
  }
}

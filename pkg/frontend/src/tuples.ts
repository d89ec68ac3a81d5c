// Tuple-key codec, mirroring the engine exactly: values join with "::",
// backslashes and colons inside values are escaped ("\\" and "\:"), so the
// separator is the only place two bare colons are ever adjacent.

export function serializeTuple(values: string[]): string {
  return values
    .map((v) => v.replace(/\\/g, '\\\\').replace(/:/g, '\\:'))
    .join('::');
}

export function deserializeTuple(key: string, arity: number): string[] {
  if (arity === 0) {
    if (key !== '') {
      throw new Error(`expected empty key for arity 0, got ${JSON.stringify(key)}`);
    }
    return [];
  }
  const values: string[] = [];
  let current = '';
  let i = 0;
  while (i < key.length) {
    const ch = key[i];
    if (ch === '\\') {
      if (i + 1 >= key.length) {
        throw new Error(`dangling escape in tuple key ${JSON.stringify(key)}`);
      }
      current += key[i + 1];
      i += 2;
    } else if (ch === ':' && key[i + 1] === ':') {
      values.push(current);
      current = '';
      i += 2;
    } else {
      current += ch;
      i += 1;
    }
  }
  values.push(current);
  if (values.length !== arity) {
    throw new Error(
      `tuple key ${JSON.stringify(key)} has ${values.length} values, expected ${arity}`,
    );
  }
  return values;
}

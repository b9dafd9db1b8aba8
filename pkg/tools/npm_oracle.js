// Reads JSON lines {spec, version} on stdin; prints "true"/"false"/"invalid" per line.
const semver = require('semver');
const lines = require('fs').readFileSync(0, 'utf8').split('\n').filter(Boolean);
const out = [];
for (const line of lines) {
  const {spec, version} = JSON.parse(line);
  let r;
  try {
    if (semver.validRange(spec, {loose: false}) === null || semver.valid(version) === null) {
      r = 'invalid';
    } else {
      r = String(semver.satisfies(version, spec));
    }
  } catch (e) {
    r = 'invalid';
  }
  out.push(r);
}
console.log(out.join('\n'));

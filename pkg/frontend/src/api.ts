/** Thin typed client for the recommender API.
 *
 * Every non-2xx response is thrown as an ApiError carrying the server's
 * status/code/message/details body, so views can map failures to visible
 * messages without inspecting raw responses.
 */

import type {
  ApiErrorBody,
  AttendanceRow,
  FacultyProfile,
  ProfileInput,
  Recommendation,
  ReportFilters,
  StpItem,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: string[];

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.status = body.status;
    this.code = body.code;
    this.details = body.details ?? [];
  }
}

export interface FeedOptions {
  limit?: number;
  alpha?: number;
  includePast?: boolean;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.baseUrl + path, init);
    if (response.status === 204) {
      return undefined as T;
    }
    if (!response.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        parsed = { status: response.status, code: "internal", message: response.statusText };
      }
      throw new ApiError(parsed);
    }
    return (await response.json()) as T;
  }

  listFaculty(): Promise<FacultyProfile[]> {
    return this.request("GET", "/api/faculty");
  }

  getFaculty(facultyId: string): Promise<FacultyProfile> {
    return this.request("GET", `/api/faculty/${encodeURIComponent(facultyId)}`);
  }

  createFaculty(profile: ProfileInput): Promise<FacultyProfile> {
    return this.request("POST", "/api/faculty", profile);
  }

  updateFaculty(facultyId: string, profile: ProfileInput): Promise<FacultyProfile> {
    return this.request("PUT", `/api/faculty/${encodeURIComponent(facultyId)}`, profile);
  }

  getRecommendations(facultyId: string, options: FeedOptions = {}): Promise<Recommendation[]> {
    const query = new URLSearchParams();
    if (options.limit !== undefined) query.set("limit", String(options.limit));
    if (options.alpha !== undefined) query.set("alpha", String(options.alpha));
    if (options.includePast) query.set("include_past", "true");
    const suffix = query.size > 0 ? `?${query.toString()}` : "";
    return this.request(
      "GET",
      `/api/faculty/${encodeURIComponent(facultyId)}/recommendations${suffix}`,
    );
  }

  like(facultyId: string, stpId: string): Promise<unknown> {
    return this.request("POST", `/api/faculty/${encodeURIComponent(facultyId)}/likes`, {
      stp_id: stpId,
    });
  }

  unlike(facultyId: string, stpId: string): Promise<void> {
    return this.request(
      "DELETE",
      `/api/faculty/${encodeURIComponent(facultyId)}/likes/${encodeURIComponent(stpId)}`,
    );
  }

  addAttendance(facultyId: string, stpId: string, dateAttended: string, remarks?: string): Promise<unknown> {
    return this.request("POST", `/api/faculty/${encodeURIComponent(facultyId)}/attendance`, {
      stp_id: stpId,
      date_attended: dateAttended,
      remarks: remarks || null,
    });
  }

  private reportQuery(filters: ReportFilters): string {
    const query = new URLSearchParams();
    if (filters.college) query.set("college", filters.college);
    if (filters.from) query.set("from", filters.from);
    if (filters.to) query.set("to", filters.to);
    return query.size > 0 ? `?${query.toString()}` : "";
  }

  attendanceReport(filters: ReportFilters = {}): Promise<AttendanceRow[]> {
    return this.request("GET", `/api/reports/attendance${this.reportQuery(filters)}`);
  }

  /** URL for the CSV download link; the browser fetches the API bytes directly. */
  reportCsvUrl(filters: ReportFilters = {}): string {
    const base = this.reportQuery(filters);
    const suffix = base ? `${base}&format=csv` : "?format=csv";
    return `${this.baseUrl}/api/reports/attendance${suffix}`;
  }

  listStp(): Promise<StpItem[]> {
    return this.request("GET", "/api/stp");
  }
}
